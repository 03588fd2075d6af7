#include "fawcon/app.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "json.hpp"

namespace fawcon::app {

using nlohmann::json;

LogLevel log_threshold() {
  const char* env = std::getenv("FAWCON_LOG");
  if (!env) return LogLevel::Warn;
  const std::string_view v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "info") return LogLevel::Info;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

void log(LogLevel level, std::string_view message) {
  if (level > log_threshold()) return;
  static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
  std::cerr << "[fawcon " << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

void validate(const RunConfig& config) {
  const auto& p = config.pipeline;
  if (!(p.index.half_width > 0.0)) throw UsageError("--half-interval must be positive");
  if (!(p.index.merge_distance >= 0.0 && p.index.merge_distance < p.index.half_width)) {
    throw UsageError("--merge-dist must satisfy 0 <= delta < half-interval");
  }
  if (!(p.octree.child_distance > 0.0)) throw UsageError("--child-dist must be positive");
  if (p.ring_order < 1) throw UsageError("--rings must be >= 1");
  if (p.threads < 1) throw UsageError("--threads must be >= 1");
  if (config.classes < 1) throw UsageError("--classes must be >= 1");
}

WeightFunction make_weight(const RunConfig& config) {
  try {
    return WeightFunction::parse(config.weight);
  } catch (const DomainError& e) {
    throw UsageError(std::string("--weight: ") + e.what());
  }
}

ClassificationHead make_head(const RunConfig& config, std::size_t input_dim) {
  if (config.head.starts_with("seed:")) {
    const std::string arg = config.head.substr(5);
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (arg.empty() || used != arg.size()) throw UsageError("--head: bad seed '" + arg + "'");
    return ClassificationHead::random(input_dim, config.classes, seed);
  }
  return ClassificationHead::load(config.head);
}

std::string report_json(const IngestReport& r) {
  json j = {{"frame", r.frame},
            {"observations", r.observations},
            {"inserted", r.inserted},
            {"merged", r.merged},
            {"rebuilt", r.rebuilt},
            {"reevaluated", r.reevaluated},
            {"points", r.scene_points},
            {"wall_ms", r.wall_ms},
            {"insert_ms", r.insert_ms},
            {"rebuild_ms", r.rebuild_ms},
            {"conv_ms", r.conv_ms}};
  j["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
  json per_class = json::array();
  for (const auto& a : r.class_accuracy) per_class.push_back(a ? json(*a) : json(nullptr));
  j["class_accuracy"] = per_class;
  return j.dump();
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Runs the whole manifest through one pipeline, calling `on_report` per frame.
template <typename OnReport>
std::optional<Pipeline> replay_frames(const std::vector<std::filesystem::path>& frames,
                                      const RunConfig& config, const WeightFunction& weight,
                                      OnReport on_report) {
  std::optional<Pipeline> pipeline;
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const Frame frame = read_frame(frames[k], static_cast<std::int64_t>(k));
    if (!pipeline) {
      pipeline.emplace(config.pipeline, weight, make_head(config, frame.input_dim));
    }
    const IngestReport report = pipeline->ingest(frame);
    log(LogLevel::Info, "frame " + std::to_string(frame.index) + ": " +
                            std::to_string(report.inserted) + " inserted, " +
                            std::to_string(report.merged) + " merged");
    on_report(report);
  }
  return pipeline;
}

}  // namespace

ReplayResult run_replay(const std::filesystem::path& manifest, const RunConfig& config) {
  validate(config);
  const WeightFunction weight = make_weight(config);
  const auto frames = read_manifest(manifest);
  ensure_dir(config.out);

  ReplayResult result;
  result.labels = config.out / "labels.csv";
  result.log = config.out / "reports.jsonl";
  std::ofstream log_out(result.log, std::ios::trunc);
  if (!log_out) throw IoError("cannot write report log " + result.log.string());

  auto pipeline = replay_frames(frames, config, weight, [&](const IngestReport& r) {
    log_out << report_json(r) << '\n';
    result.reports.push_back(r);
  });
  if (!log_out) throw IoError("failed writing report log " + result.log.string());

  if (pipeline) {
    pipeline->export_labels(result.labels);
    result.points = pipeline->scene().size();
    result.accuracy = pipeline->accuracy();
  } else {
    std::ofstream out(result.labels, std::ios::trunc);
    if (!out) throw IoError("cannot write label export " + result.labels.string());
    out << "id,x,y,z,label,uncertainty,observations\n";
  }
  return result;
}

std::filesystem::path run_gen(const synth::GeneratorParams& params,
                              const std::filesystem::path& out) {
  synth::GeneratedScene scene;
  try {
    scene = synth::generate_scene(params);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return synth::write_scene(scene, out);
}

BenchResult run_bench(const std::filesystem::path& manifest, const RunConfig& config) {
  validate(config);
  const WeightFunction weight = make_weight(config);
  const auto frames = read_manifest(manifest);
  ensure_dir(config.out);

  BenchResult result;
  double total_ms = 0.0;
  replay_frames(frames, config, weight, [&](const IngestReport& r) {
    BenchRow row;
    row.frame = r.frame;
    row.points = r.observations;
    row.insert_ms = r.insert_ms;
    row.rebuild_ms = r.rebuild_ms;
    row.conv_ms = r.conv_ms;
    row.fps = r.wall_ms > 0.0 ? 1000.0 / r.wall_ms : 0.0;
    total_ms += r.wall_ms;
    result.rows.push_back(row);
  });
  result.aggregate_fps =
      total_ms > 0.0 ? 1000.0 * static_cast<double>(result.rows.size()) / total_ms : 0.0;

  result.csv = config.out / "bench.csv";
  std::ofstream out(result.csv, std::ios::trunc);
  if (!out) throw IoError("cannot write " + result.csv.string());
  out << "frame,points,insert_ms,rebuild_ms,conv_ms,fps\n";
  char line[256];
  for (const auto& row : result.rows) {
    std::snprintf(line, sizeof line, "%lld,%zu,%.4f,%.4f,%.4f,%.3f\n",
                  static_cast<long long>(row.frame), row.points, row.insert_ms, row.rebuild_ms,
                  row.conv_ms, row.fps);
    out << line;
  }
  return result;
}

double matched_radius(const GlobalIndex& index, double target) {
  if (index.size() == 0) return 0.0;
  auto mean_size = [&](double r) {
    double total = 0.0;
    for (std::size_t i = 0; i < index.id_bound(); ++i) {
      const PointId p = point_id(i);
      if (index.contains(p)) total += static_cast<double>(index.ball(index.position(p), r).size());
    }
    return total / static_cast<double>(index.size());
  };
  double lo = 0.0, hi = 2.0 * index.config().half_width;
  while (mean_size(hi) < target && hi < 1e3) hi *= 2.0;
  for (int iter = 0; iter < 40; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mean_size(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<CompareRow> run_compare(const std::filesystem::path& manifest, const RunConfig& config,
                                    const std::vector<int>& n_range) {
  validate(config);
  if (n_range.empty()) throw UsageError("--n-range must list at least one ring order");
  for (int n : n_range) {
    if (n < 1) throw UsageError("ring orders in --n-range must be >= 1");
  }
  const WeightFunction weight = make_weight(config);
  const auto paths = read_manifest(manifest);
  std::vector<Frame> frames;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    frames.push_back(read_frame(paths[k], static_cast<std::int64_t>(k)));
    if (!frames.back().has_labels) {
      throw UsageError("neighborhood comparison needs ground-truth labels; " + paths[k].string() +
                       " has none");
    }
  }
  if (frames.empty()) throw UsageError("neighborhood comparison needs at least one frame");
  ensure_dir(config.out);

  const ClassificationHead head = make_head(config, frames.front().input_dim);
  std::vector<CompareRow> rows;
  for (int n : n_range) {
    PipelineConfig octree_cfg = config.pipeline;
    octree_cfg.ring_order = n;
    octree_cfg.mode = NeighborhoodMode::Octree;
    Pipeline octree_run(octree_cfg, weight, head);
    for (const auto& f : frames) octree_run.ingest(f);

    double ring_total = 0.0;
    const std::size_t count = octree_run.scene().size();
    for (std::size_t i = 0; i < count; ++i) {
      ring_total += static_cast<double>(octree_run.support(point_id(i)).size());
    }
    const double ring_mean = count ? ring_total / static_cast<double>(count) : 0.0;
    rows.push_back({n, NeighborhoodMode::Octree, octree_run.accuracy().value_or(0.0), ring_mean, 0.0});

    PipelineConfig ball_cfg = octree_cfg;
    ball_cfg.mode = NeighborhoodMode::Euclidean;
    ball_cfg.euclidean_radius = matched_radius(octree_run.index(), ring_mean);
    Pipeline ball_run(ball_cfg, weight, head);
    for (const auto& f : frames) ball_run.ingest(f);
    double ball_total = 0.0;
    for (std::size_t i = 0; i < ball_run.scene().size(); ++i) {
      ball_total += static_cast<double>(ball_run.support(point_id(i)).size());
    }
    const double ball_mean =
        ball_run.scene().size() ? ball_total / static_cast<double>(ball_run.scene().size()) : 0.0;
    rows.push_back({n, NeighborhoodMode::Euclidean, ball_run.accuracy().value_or(0.0), ball_mean,
                    ball_cfg.euclidean_radius});
  }

  std::ofstream out(config.out / "compare.csv", std::ios::trunc);
  if (!out) throw IoError("cannot write " + (config.out / "compare.csv").string());
  out << "n,mode,accuracy,mean_size,radius\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%s,%.6f,%.4f,%.6f\n", r.n,
                  r.mode == NeighborhoodMode::Octree ? "octree" : "euclidean", r.accuracy,
                  r.mean_size, r.radius);
    out << line;
  }
  return rows;
}

}  // namespace fawcon::app
