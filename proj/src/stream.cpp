#include "fawcon/stream.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

namespace fawcon {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

SceneConfig scene_config_for(const ClassificationHead& head, FusionStage stage) {
  SceneConfig cfg;
  cfg.input_dim = head.input_dim();
  cfg.class_count = head.class_count();
  cfg.best_dim =
      stage == FusionStage::HeadFeature ? ClassificationHead::kFeatureDim : head.input_dim();
  return cfg;
}

Pipeline::Pipeline(PipelineConfig config, WeightFunction weight, ClassificationHead head)
    : config_(config),
      weight_(std::move(weight)),
      head_(std::move(head)),
      store_(scene_config_for(head_, config.fusion_stage)),
      index_(config.index),
      octrees_(config.octree) {
  if (config_.ring_order < 1) throw DomainError("ring order must be >= 1");
  if (config_.mode == NeighborhoodMode::Euclidean && !(config_.euclidean_radius > 0.0)) {
    throw DomainError("euclidean mode needs a positive radius");
  }
  if (config_.threads == 0) config_.threads = 1;
}

std::vector<PointId> Pipeline::support(PointId p) const {
  if (config_.mode == NeighborhoodMode::Euclidean) {
    return index_.ball(store_.position(p), config_.euclidean_radius);
  }
  return octrees_.ring(p, config_.ring_order).members;
}

Pipeline::Evaluation Pipeline::evaluate(PointId p) const {
  const std::vector<PointId> members = support(p);
  const std::vector<double> conv = convolve(p, members, weight_, store_);

  Evaluation ev;
  if (config_.fusion_stage == FusionStage::HeadFeature) {
    const Classification current = classify(conv, head_);
    const std::vector<double> fused = frame_fuse(p, current.feature, store_);
    ev.probabilities = head_.classify_embedding(fused).probabilities;
    ev.best_candidate.assign(current.feature.begin(), current.feature.end());
    ev.candidate_uncertainty = current.distribution.uncertainty;
  } else {
    const Classification current = classify(conv, head_);
    const std::vector<double> fused = frame_fuse(p, conv, store_);
    ev.probabilities = classify(fused, head_).distribution.probabilities;
    ev.best_candidate.assign(conv.begin(), conv.end());
    ev.candidate_uncertainty = current.distribution.uncertainty;
  }
  return ev;
}

void Pipeline::reevaluate(const std::vector<PointId>& touched, std::int64_t frame) {
  std::vector<Evaluation> results(touched.size());
  const std::size_t workers = std::min<std::size_t>(config_.threads, touched.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < touched.size(); ++i) results[i] = evaluate(touched[i]);
  } else {
    // Each point's evaluation only reads shared state; results are applied
    // serially below, so the outcome does not depend on scheduling.
    std::vector<std::thread> pool;
    const std::size_t chunk = (touched.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(touched.size(), lo + chunk);
        for (std::size_t i = lo; i < hi; ++i) results[i] = evaluate(touched[i]);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < touched.size(); ++i) {
    const PointId p = touched[i];
    store_.record_best(p, results[i].best_candidate, results[i].candidate_uncertainty);
    store_.set_label_distribution(p, std::move(results[i].probabilities));
    store_.touch(p, frame);
  }
}

IngestReport Pipeline::ingest(const Frame& frame) {
  if (last_frame_ && frame.index <= *last_frame_) {
    throw OrderingError("frame index " + std::to_string(frame.index) +
                        " does not follow previous frame " + std::to_string(*last_frame_));
  }
  if (!frame.observations.empty() && frame.input_dim != store_.config().input_dim) {
    throw DimensionError("frame " + std::to_string(frame.index) + " carries " +
                         std::to_string(frame.input_dim) + "-wide features, head expects " +
                         std::to_string(store_.config().input_dim));
  }
  last_frame_ = frame.index;

  const auto start = Clock::now();
  IngestReport report;
  report.frame = frame.index;

  std::vector<std::size_t> order(frame.observations.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (config_.frame_cap > 0 && order.size() > config_.frame_cap) {
    std::vector<std::size_t> kept;
    kept.reserve(config_.frame_cap);
    std::mt19937_64 rng(config_.cap_seed ^ static_cast<std::uint64_t>(frame.index));
    std::sample(order.begin(), order.end(), std::back_inserter(kept), config_.frame_cap, rng);
    order = std::move(kept);
  }
  report.observations = order.size();

  std::vector<PointId> touched;
  double rebuild_ms = 0.0;
  for (std::size_t i : order) {
    const Observation& obs = frame.observations[i];
    if (auto match = index_.correspond(obs.position)) {
      store_.merge_observation(*match, obs.feature);
      touched.push_back(*match);
      ++report.merged;
      continue;
    }
    const PointId p = store_.allocate_point(obs.position, obs.feature);
    ground_truth_.push_back(obs.label ? *obs.label : -1);
    index_.insert(p, obs.position);
    ++report.inserted;

    const auto t_rebuild = Clock::now();
    std::vector<PointId> affected = octrees_.rebuild_affected(p, index_);
    report.rebuilt += affected.size();
    if (config_.mode == NeighborhoodMode::Euclidean) {
      affected = index_.ball(obs.position, config_.euclidean_radius);
    }
    touched.insert(touched.end(), affected.begin(), affected.end());
    rebuild_ms += elapsed_ms(t_rebuild);
  }
  report.rebuild_ms = rebuild_ms;
  report.insert_ms = std::max(0.0, elapsed_ms(start) - rebuild_ms);

  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  const auto t_conv = Clock::now();
  reevaluate(touched, frame.index);
  report.conv_ms = elapsed_ms(t_conv);
  report.reevaluated = touched.size();

  report.wall_ms = elapsed_ms(start);
  report.scene_points = store_.size();
  report.accuracy = accuracy();
  report.class_accuracy = class_accuracy();
  return report;
}

std::optional<int> Pipeline::ground_truth(PointId p) const {
  const std::size_t i = index_of(p);
  if (i >= ground_truth_.size() || ground_truth_[i] < 0) return std::nullopt;
  return ground_truth_[i];
}

std::optional<double> Pipeline::accuracy() const {
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < ground_truth_.size(); ++i) {
    if (ground_truth_[i] < 0) continue;
    const int predicted = store_.at(point_id(i)).predicted_label();
    if (predicted < 0) continue;
    ++total;
    correct += predicted == ground_truth_[i] ? 1 : 0;
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<std::optional<double>> Pipeline::class_accuracy() const {
  const std::size_t classes = store_.config().class_count;
  std::vector<std::size_t> total(classes, 0), correct(classes, 0);
  for (std::size_t i = 0; i < ground_truth_.size(); ++i) {
    const int gt = ground_truth_[i];
    if (gt < 0 || static_cast<std::size_t>(gt) >= classes) continue;
    const int predicted = store_.at(point_id(i)).predicted_label();
    if (predicted < 0) continue;
    ++total[gt];
    correct[gt] += predicted == gt ? 1 : 0;
  }
  std::vector<std::optional<double>> out(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    if (total[c]) out[c] = static_cast<double>(correct[c]) / static_cast<double>(total[c]);
  }
  return out;
}

void Pipeline::write_labels(std::ostream& out) const {
  std::string buf = "id,x,y,z,label,uncertainty,observations\n";
  char line[256];
  for (std::size_t i = 0; i < store_.size(); ++i) {
    const PointRecord& rec = store_.at(point_id(i));
    const double uncertainty =
        rec.label_distribution.empty() ? 1.0 : normalized_entropy(rec.label_distribution);
    const int n = std::snprintf(line, sizeof line, "%zu,%.6f,%.6f,%.6f,%d,%.6f,%u\n", i,
                                rec.position[0], rec.position[1], rec.position[2],
                                rec.predicted_label(), uncertainty, rec.observation_count);
    buf.append(line, static_cast<std::size_t>(n));
  }
  out << buf;
}

void Pipeline::export_labels(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write label export " + path.string());
  write_labels(out);
  if (!out) throw IoError("failed writing label export " + path.string());
}

}  // namespace fawcon
