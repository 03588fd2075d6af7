#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fawcon/local_octree.hpp"
#include "fawcon/mlp.hpp"
#include "fawcon/scene_store.hpp"

namespace fawcon {

/// Kernel W(dp): maps a neighbor offset to a per-channel weight vector.
class WeightFunction {
 public:
  struct Constant {};
  struct Gaussian {
    double sigma;
  };
  struct Learned {
    Mlp net;  // 3 -> ... -> D_in
  };

  static WeightFunction constant() { return WeightFunction(Constant{}); }
  static WeightFunction gaussian(double sigma);
  static WeightFunction learned(Mlp net);
  /// "const", "gauss:<sigma>" or "mlp:<parameter file>".
  static WeightFunction parse(std::string_view spec);

  /// Writes the weight for `delta` into `out` (one entry per feature channel).
  void evaluate(const Vec3& delta, std::span<double> out) const;

  const auto& kind() const noexcept { return kind_; }
  std::string describe() const;

 private:
  using Kind = std::variant<Constant, Gaussian, Learned>;
  explicit WeightFunction(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

struct ClassDistribution {
  std::vector<double> probabilities;
  double uncertainty = 1.0;  // entropy / log(C)
  int label = -1;            // argmax, ties to the smaller class id
};

/// Three-layer trunk producing a 128-wide feature, then a linear classifier.
class ClassificationHead {
 public:
  static constexpr std::size_t kFeatureDim = 128;

  ClassificationHead(Mlp trunk, DenseLayer classifier);

  /// Random trunk and classifier from a seeded generator.
  static ClassificationHead random(std::size_t input_dim, std::size_t classes,
                                   std::uint64_t seed, std::size_t hidden = 128);
  /// Splits a 4-layer network (D_in, h1, h2, 128, C) into trunk and classifier.
  static ClassificationHead from_network(const Mlp& net);
  static ClassificationHead load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  Mlp as_network() const;

  std::size_t input_dim() const noexcept { return trunk_.input_dim(); }
  std::size_t class_count() const noexcept { return classifier_.outputs; }

  std::vector<double> embed(std::span<const double> input) const;
  ClassDistribution classify_embedding(std::span<const double> feature) const;

 private:
  Mlp trunk_;
  DenseLayer classifier_;
};

struct Classification {
  std::vector<double> feature;  // 128-wide head feature
  ClassDistribution distribution;
};

ClassDistribution softmax_distribution(std::span<const double> logits);
/// Entropy of `probabilities` divided by log(C); 0 when C == 1.
double normalized_entropy(std::span<const double> probabilities);

/// Weighted sum of fused features over `members`, offsets taken relative to
/// `center`. Terms are accumulated in the order given.
std::vector<double> convolve(PointId center, std::span<const PointId> members,
                             const WeightFunction& weight, const SceneStore& store);

/// Fusion-aware point convolution over the n-ring of p.
std::vector<double> fpc(PointId p, int n, const WeightFunction& weight, const SceneStore& store,
                        const OctreeForest& forest);

Classification classify(std::span<const double> feature, const ClassificationHead& head);

/// Element-wise max of `current` with p's stored best feature, if any.
std::vector<double> frame_fuse(PointId p, std::span<const double> current,
                               const SceneStore& store);

}  // namespace fawcon
