#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fawcon/types.hpp"

namespace fawcon {

struct SceneConfig {
  std::size_t input_dim = 8;     // D_in, width of per-observation input features
  std::size_t class_count = 2;   // C
  std::size_t best_dim = 128;    // width of the feature kept for frame-to-frame fusion
};

struct PointRecord {
  Vec3 position{};
  Feature fused;  // running element-wise max of every observed input feature
  std::uint32_t observation_count = 0;
  std::optional<Feature> best_feature;
  std::optional<double> best_uncertainty;
  std::vector<double> label_distribution;  // empty until first classification
  std::int64_t last_frame = -1;

  /// argmax of label_distribution (ties to the smaller class id), or -1.
  int predicted_label() const;
};

/// Canonical per-point state. Points are only ever added.
class SceneStore {
 public:
  explicit SceneStore(SceneConfig config);

  const SceneConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool contains(PointId p) const noexcept { return index_of(p) < records_.size(); }

  PointId allocate_point(const Vec3& position, std::span<const float> feature);

  /// Max-pools `feature` into the point's fused feature and returns the result.
  const Feature& merge_observation(PointId p, std::span<const float> feature);

  /// Keeps (feature, uncertainty) if it is strictly less uncertain than the
  /// stored best. Returns whether it was accepted.
  bool record_best(PointId p, std::span<const float> feature, double uncertainty);

  void set_label_distribution(PointId p, std::vector<double> distribution);
  void touch(PointId p, std::int64_t frame);

  const PointRecord& at(PointId p) const;
  const Vec3& position(PointId p) const { return at(p).position; }
  const Feature& fused(PointId p) const { return at(p).fused; }

 private:
  PointRecord& mutable_at(PointId p);
  void check_input_dim(std::span<const float> feature) const;

  SceneConfig config_;
  std::vector<PointRecord> records_;
};

}  // namespace fawcon
