#include "fawcon/fusion_conv.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fawcon {

WeightFunction WeightFunction::gaussian(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("gaussian sigma must be positive");
  return WeightFunction(Gaussian{sigma});
}

WeightFunction WeightFunction::learned(Mlp net) {
  if (net.input_dim() != 3) throw DimensionError("weight network must take a 3-vector offset");
  return WeightFunction(Learned{std::move(net)});
}

WeightFunction WeightFunction::parse(std::string_view spec) {
  if (spec == "const" || spec == "constant") return constant();
  if (spec.starts_with("gauss:")) {
    const std::string arg(spec.substr(6));
    std::size_t used = 0;
    double sigma = 0.0;
    try {
      sigma = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size() || arg.empty()) throw DomainError("bad gaussian sigma '" + arg + "'");
    return gaussian(sigma);
  }
  if (spec.starts_with("mlp:")) return learned(read_parameter_file(std::string(spec.substr(4))));
  throw DomainError("unknown weight function '" + std::string(spec) + "'");
}

void WeightFunction::evaluate(const Vec3& delta, std::span<double> out) const {
  if (std::holds_alternative<Constant>(kind_)) {
    std::fill(out.begin(), out.end(), 1.0);
  } else if (const auto* g = std::get_if<Gaussian>(&kind_)) {
    const double w = std::exp(-squared_norm(delta) / (2.0 * g->sigma * g->sigma));
    std::fill(out.begin(), out.end(), w);
  } else {
    const auto& net = std::get<Learned>(kind_).net;
    if (net.output_dim() != out.size()) {
      throw DimensionError("weight network yields " + std::to_string(net.output_dim()) +
                           " channels, features have " + std::to_string(out.size()));
    }
    const std::vector<double> w = net.forward(std::span<const double>(delta.data(), 3));
    std::copy(w.begin(), w.end(), out.begin());
  }
}

std::string WeightFunction::describe() const {
  std::ostringstream os;
  if (std::holds_alternative<Constant>(kind_)) {
    os << "const";
  } else if (const auto* g = std::get_if<Gaussian>(&kind_)) {
    os << "gauss:" << g->sigma;
  } else {
    os << "mlp";
  }
  return os.str();
}

ClassificationHead::ClassificationHead(Mlp trunk, DenseLayer classifier)
    : trunk_(std::move(trunk)), classifier_(std::move(classifier)) {
  if (trunk_.layers().size() != 3) throw DimensionError("head trunk must have three layers");
  if (trunk_.output_dim() != kFeatureDim) {
    throw DimensionError("head trunk must produce a 128-wide feature");
  }
  if (classifier_.inputs != kFeatureDim || classifier_.outputs == 0 ||
      classifier_.weights.size() != classifier_.inputs * classifier_.outputs ||
      classifier_.bias.size() != classifier_.outputs) {
    throw DimensionError("classifier must map the 128-wide feature to C logits");
  }
  classifier_.pack();
}

ClassificationHead ClassificationHead::random(std::size_t input_dim, std::size_t classes,
                                              std::uint64_t seed, std::size_t hidden) {
  const std::vector<std::size_t> sizes{input_dim, hidden, hidden, kFeatureDim, classes};
  return from_network(Mlp::random(sizes, seed));
}

ClassificationHead ClassificationHead::from_network(const Mlp& net) {
  const auto& layers = net.layers();
  if (layers.size() != 4) {
    throw DimensionError("head parameters need four layers (three trunk + classifier), got " +
                         std::to_string(layers.size()));
  }
  return ClassificationHead(Mlp({layers[0], layers[1], layers[2]}), layers[3]);
}

ClassificationHead ClassificationHead::load(const std::filesystem::path& path) {
  return from_network(read_parameter_file(path));
}

void ClassificationHead::save(const std::filesystem::path& path) const {
  write_parameter_file(path, as_network());
}

Mlp ClassificationHead::as_network() const {
  std::vector<DenseLayer> layers = trunk_.layers();
  layers.push_back(classifier_);
  return Mlp(std::move(layers));
}

std::vector<double> ClassificationHead::embed(std::span<const double> input) const {
  return trunk_.forward(input);
}

double normalized_entropy(std::span<const double> probabilities) {
  if (probabilities.size() < 2) return 0.0;
  double entropy = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) entropy -= p * std::log(p);
  }
  return std::clamp(entropy / std::log(static_cast<double>(probabilities.size())), 0.0, 1.0);
}

ClassDistribution softmax_distribution(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax needs at least one logit");
  ClassDistribution out;
  const double top = *std::max_element(logits.begin(), logits.end());
  out.probabilities.resize(logits.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < logits.size(); ++c) {
    out.probabilities[c] = std::exp(logits[c] - top);
    sum += out.probabilities[c];
  }
  for (auto& p : out.probabilities) p /= sum;
  out.uncertainty = normalized_entropy(out.probabilities);
  out.label = static_cast<int>(std::max_element(out.probabilities.begin(), out.probabilities.end()) -
                               out.probabilities.begin());
  return out;
}

ClassDistribution ClassificationHead::classify_embedding(std::span<const double> feature) const {
  if (feature.size() != kFeatureDim) {
    throw DimensionError("classifier input has dimension " + std::to_string(feature.size()) +
                         ", expected 128");
  }
  std::vector<double> logits(classifier_.outputs);
  classifier_.forward(feature, logits);
  return softmax_distribution(logits);
}

std::vector<double> convolve(PointId center, std::span<const PointId> members,
                             const WeightFunction& weight, const SceneStore& store) {
  const std::size_t dim = store.config().input_dim;
  const Vec3& origin = store.position(center);
  std::vector<double> out(dim, 0.0);
  std::vector<double> w(dim);
  for (PointId r : members) {
    const PointRecord& rec = store.at(r);
    weight.evaluate(rec.position - origin, w);
    for (std::size_t i = 0; i < dim; ++i) out[i] += w[i] * static_cast<double>(rec.fused[i]);
  }
  return out;
}

std::vector<double> fpc(PointId p, int n, const WeightFunction& weight, const SceneStore& store,
                        const OctreeForest& forest) {
  store.at(p);
  const RingSet ring = forest.ring(p, n);
  return convolve(p, ring.members, weight, store);
}

Classification classify(std::span<const double> feature, const ClassificationHead& head) {
  if (feature.size() != head.input_dim()) {
    throw DimensionError("head expects input dimension " + std::to_string(head.input_dim()) +
                         ", got " + std::to_string(feature.size()));
  }
  Classification out;
  out.feature = head.embed(feature);
  out.distribution = head.classify_embedding(out.feature);
  return out;
}

std::vector<double> frame_fuse(PointId p, std::span<const double> current,
                               const SceneStore& store) {
  if (current.size() != store.config().best_dim) {
    throw DimensionError("frame fusion input has dimension " + std::to_string(current.size()) +
                         ", expected " + std::to_string(store.config().best_dim));
  }
  std::vector<double> out(current.begin(), current.end());
  const PointRecord& rec = store.at(p);
  if (rec.best_feature) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = std::max(out[i], static_cast<double>((*rec.best_feature)[i]));
    }
  }
  return out;
}

}  // namespace fawcon
