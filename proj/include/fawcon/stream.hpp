#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fawcon/frame_io.hpp"
#include "fawcon/fusion_conv.hpp"
#include "fawcon/global_index.hpp"
#include "fawcon/local_octree.hpp"
#include "fawcon/scene_store.hpp"

namespace fawcon {

enum class NeighborhoodMode { Octree, Euclidean };

/// Which feature is max-pooled across frames: the 128-wide head feature, or
/// the raw convolution output before the head.
enum class FusionStage { HeadFeature, Convolved };

struct PipelineConfig {
  GlobalIndexConfig index;
  OctreeConfig octree;
  int ring_order = 2;
  NeighborhoodMode mode = NeighborhoodMode::Octree;
  double euclidean_radius = 0.0;  // used in Euclidean mode
  FusionStage fusion_stage = FusionStage::HeadFeature;
  std::size_t frame_cap = 0;  // 0 disables per-frame subsampling
  std::uint64_t cap_seed = 0;
  unsigned threads = 1;
};

struct IngestReport {
  std::int64_t frame = 0;
  std::size_t observations = 0;
  std::size_t inserted = 0;
  std::size_t merged = 0;
  std::size_t rebuilt = 0;
  std::size_t reevaluated = 0;
  double wall_ms = 0.0;
  double insert_ms = 0.0;
  double rebuild_ms = 0.0;
  double conv_ms = 0.0;
  std::size_t scene_points = 0;
  std::optional<double> accuracy;               // over all labeled points
  std::vector<std::optional<double>> class_accuracy;  // per ground-truth class
};

/// Streaming ingestion: correspondence, insertion, tree maintenance and
/// per-frame re-evaluation of every touched point.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, WeightFunction weight, ClassificationHead head);

  IngestReport ingest(const Frame& frame);

  const PipelineConfig& config() const noexcept { return config_; }
  const SceneStore& scene() const noexcept { return store_; }
  const GlobalIndex& index() const noexcept { return index_; }
  const OctreeForest& octrees() const noexcept { return octrees_; }
  const ClassificationHead& head() const noexcept { return head_; }
  const WeightFunction& weight() const noexcept { return weight_; }

  /// Convolution support of p under the configured neighborhood mode.
  std::vector<PointId> support(PointId p) const;

  std::optional<int> ground_truth(PointId p) const;
  std::optional<double> accuracy() const;
  std::vector<std::optional<double>> class_accuracy() const;

  /// CSV: id,x,y,z,label,uncertainty,observations
  void write_labels(std::ostream& out) const;
  void export_labels(const std::filesystem::path& path) const;

 private:
  struct Evaluation {
    Feature best_candidate;
    double candidate_uncertainty = 1.0;
    std::vector<double> probabilities;
  };
  Evaluation evaluate(PointId p) const;
  void reevaluate(const std::vector<PointId>& touched, std::int64_t frame);

  PipelineConfig config_;
  WeightFunction weight_;
  ClassificationHead head_;
  SceneStore store_;
  GlobalIndex index_;
  OctreeForest octrees_;
  std::vector<int> ground_truth_;  // -1 when unknown
  std::optional<std::int64_t> last_frame_;
};

SceneConfig scene_config_for(const ClassificationHead& head, FusionStage stage);

}  // namespace fawcon
