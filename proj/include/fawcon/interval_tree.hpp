#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "fawcon/types.hpp"

namespace fawcon {

/// Red-black tree of disjoint, fixed-width coordinate slabs along one axis.
///
/// Slabs live on a lattice anchored at the first inserted coordinate c0:
/// slab k covers [c0 + (2k-1)h, c0 + (2k+1)h). Only slabs that received a
/// point (or were pre-created next to one) exist as nodes. In-order traversal
/// yields strictly increasing, pairwise-disjoint intervals, so for a left
/// child l and parent p, max(l) <= min(p) with the half-open convention.
class CoordinateIntervalTree {
 public:
  using Handle = std::uint32_t;
  static constexpr Handle kNil = 0xffffffffu;

  enum class Color : std::uint8_t { Red, Black };

  struct Node {
    std::int64_t key = 0;  // lattice index
    double min = 0.0;      // inclusive
    double max = 0.0;      // exclusive
    Color color = Color::Red;
    Handle left = kNil;
    Handle right = kNil;
    Handle parent = kNil;
    std::vector<PointId> points;  // ascending

    bool contains(double c) const noexcept { return c >= min && c < max; }
  };

  explicit CoordinateIntervalTree(double half_width, bool precreate_neighbors = false);

  /// Adds `p` to the slab containing `coordinate`, creating and rebalancing
  /// when the slab does not exist yet. Returns the slab holding `p`.
  Handle insert(PointId p, double coordinate);

  /// Top-down search for the slab containing `coordinate`.
  std::optional<Handle> locate(double coordinate) const;
  std::optional<Handle> find_key(std::int64_t key) const;

  /// Lattice index of `coordinate`; empty until the lattice is anchored.
  std::optional<std::int64_t> key_of(double coordinate) const;
  double slab_min(std::int64_t key) const;

  bool anchored() const noexcept { return anchored_; }
  double origin() const noexcept { return origin_; }
  double half_width() const noexcept { return half_width_; }

  Handle root() const noexcept { return root_; }
  const Node& node(Handle h) const { return nodes_.at(h); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  /// Number of nodes on the longest root-to-leaf path (0 when empty).
  std::size_t height() const;
  std::vector<Handle> in_order() const;

 private:
  Handle create_node(std::int64_t key);
  void rotate_left(Handle x);
  void rotate_right(Handle x);
  void insert_fixup(Handle z);
  Color color_of(Handle h) const noexcept { return h == kNil ? Color::Black : nodes_[h].color; }

  double half_width_;
  bool precreate_neighbors_;
  bool anchored_ = false;
  double origin_ = 0.0;
  Handle root_ = kNil;
  std::vector<Node> nodes_;
};

}  // namespace fawcon
