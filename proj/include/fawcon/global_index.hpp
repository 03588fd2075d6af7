#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "fawcon/interval_tree.hpp"
#include "fawcon/types.hpp"

namespace fawcon {

struct GlobalIndexConfig {
  double half_width = 0.04;      // h, half size of a coordinate slab (meters)
  double merge_distance = 0.01;  // delta, correspondence threshold (meters); must be < h
  bool precreate_neighbors = false;
};

/// Three per-axis coordinate interval trees over a shared point population.
///
/// All set-valued queries return ids in ascending order.
class GlobalIndex {
 public:
  using Handles = std::array<CoordinateIntervalTree::Handle, 3>;

  explicit GlobalIndex(GlobalIndexConfig config = {});

  const GlobalIndexConfig& config() const noexcept { return config_; }

  Handles insert(PointId p, const Vec3& position);

  std::optional<CoordinateIntervalTree::Handle> locate(Axis axis, double coordinate) const;

  /// Points sharing q's slab on all three axes.
  std::vector<PointId> neighborhood(const Vec3& q) const;
  /// Points in the 3x3x3 block of slab-boxes around q's slab-box.
  std::vector<PointId> extended_neighborhood(const Vec3& q) const;
  /// Points within Euclidean distance `radius` of q.
  std::vector<PointId> ball(const Vec3& q, double radius) const;
  /// Nearest point within the merge distance of q, ties to the smaller id.
  std::optional<PointId> correspond(const Vec3& q) const;

  const CoordinateIntervalTree& tree(Axis axis) const { return trees_[static_cast<int>(axis)]; }
  bool contains(PointId p) const noexcept {
    return index_of(p) < inserted_.size() && inserted_[index_of(p)];
  }
  std::size_t size() const noexcept { return count_; }
  /// One past the largest id ever inserted.
  std::size_t id_bound() const noexcept { return inserted_.size(); }
  const Vec3& position(PointId p) const { return positions_.at(index_of(p)); }
  std::int64_t slab_key(PointId p, Axis axis) const {
    return keys_.at(index_of(p))[static_cast<int>(axis)];
  }

 private:
  // Gathers ids whose slab keys lie within `reach` lattice steps of q's on
  // every axis, scanning the axis with the fewest candidates.
  std::vector<PointId> block(const Vec3& q, std::int64_t reach) const;

  GlobalIndexConfig config_;
  std::array<CoordinateIntervalTree, 3> trees_;
  std::vector<Vec3> positions_;
  std::vector<std::array<std::int64_t, 3>> keys_;
  std::vector<bool> inserted_;
  std::size_t count_ = 0;
};

}  // namespace fawcon
