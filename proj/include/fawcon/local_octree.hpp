#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "fawcon/global_index.hpp"
#include "fawcon/types.hpp"

namespace fawcon {

struct OctreeConfig {
  double child_distance = 0.08;  // d^T, farthest admissible child (meters)
  // Reuse a nearby point's octree instead of searching. Off by default: the
  // copied children are generally not the nearest-per-quadrant of the new point.
  bool early_finish = false;
  double early_finish_distance = 0.04;
};

/// Quadrant of `delta` as a 3-bit index: bit a is set when component a >= 0.
constexpr int quadrant_of(const Vec3& delta) noexcept {
  return (delta[0] >= 0.0 ? 1 : 0) | (delta[1] >= 0.0 ? 2 : 0) | (delta[2] >= 0.0 ? 4 : 0);
}

/// Direction-aware 1-ring of a point: at most one child per Cartesian quadrant.
struct PointOctree {
  static constexpr double kEmpty = std::numeric_limits<double>::infinity();

  std::array<std::optional<PointId>, 8> children{};
  std::array<double, 8> child_distance{kEmpty, kEmpty, kEmpty, kEmpty,
                                       kEmpty, kEmpty, kEmpty, kEmpty};

  std::size_t child_count() const noexcept;
  bool operator==(const PointOctree&) const = default;
};

struct RingSet {
  PointId center{};
  int order = 1;
  std::vector<PointId> members;  // ascending, includes the center
};

struct TracedPath {
  std::vector<PointId> points;
  double length = 0.0;
};

/// Per-point octrees for every point of a GlobalIndex.
class OctreeForest {
 public:
  explicit OctreeForest(OctreeConfig config = {});

  const OctreeConfig& config() const noexcept { return config_; }

  /// Builds (or rebuilds) p's octree from its extended neighborhood.
  const PointOctree& build(PointId p, const GlobalIndex& index);

  /// Brings every octree up to date after `q` was inserted into `index`.
  /// Returns q plus every point whose octree changed, ascending.
  std::vector<PointId> rebuild_affected(PointId q, const GlobalIndex& index);

  /// Rebuilds every octree from scratch.
  void rebuild_all(const GlobalIndex& index);

  bool contains(PointId p) const noexcept {
    return index_of(p) < trees_.size() && built_[index_of(p)];
  }
  const PointOctree& at(PointId p) const;
  std::size_t size() const noexcept { return trees_.size(); }

  /// Points reachable from p through at most n child links.
  RingSet ring(PointId p, int n) const;

 private:
  PointOctree search(PointId p, const GlobalIndex& index) const;
  bool offer(PointId center, PointId candidate, const GlobalIndex& index);
  PointOctree& slot(PointId p);

  OctreeConfig config_;
  std::vector<PointOctree> trees_;
  std::vector<bool> built_;
};

/// Undirected graph over all octree center-child links, weighted by length.
class OctreeGraph {
 public:
  OctreeGraph(const OctreeForest& forest, const GlobalIndex& index);

  /// Dijkstra shortest path; empty when p and q are disconnected.
  std::optional<TracedPath> shortest_path(PointId p, PointId q) const;

  struct Edge {
    PointId to;
    double length;
  };
  const std::vector<Edge>& edges(PointId p) const { return adjacency_.at(index_of(p)); }
  std::size_t vertex_count() const noexcept { return adjacency_.size(); }

 private:
  std::vector<std::vector<Edge>> adjacency_;
};

std::optional<TracedPath> trace_path(const OctreeForest& forest, const GlobalIndex& index,
                                     PointId p, PointId q);

}  // namespace fawcon
