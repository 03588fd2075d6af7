#pragma once

// Brute-force reference implementations. Deliberately simple, O(n) per query
// or worse, and independent of the index/octree/convolution code paths.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fawcon/interval_tree.hpp"
#include "fawcon/mlp.hpp"
#include "fawcon/types.hpp"

namespace fawcon::oracle {

struct OraclePoint {
  Vec3 position{};
  Feature feature;
  int label = -1;
};
using OracleScene = std::vector<OraclePoint>;

/// Slab lattice anchored at the first point of a cloud (one origin per axis).
struct Lattice {
  Vec3 origin{};
  double half_width = 0.04;

  std::int64_t key(double coordinate, int axis) const;
};

Lattice lattice_for(std::span<const Vec3> cloud, double half_width);

std::vector<std::size_t> brute_neighborhood(const Vec3& q, std::span<const Vec3> cloud,
                                            double half_width);
std::vector<std::size_t> brute_extended_neighborhood(const Vec3& q, std::span<const Vec3> cloud,
                                                     double half_width);
std::optional<std::size_t> brute_correspond(const Vec3& q, std::span<const Vec3> cloud,
                                            double merge_distance);
/// Number of distinct slabs occupied along `axis`.
std::size_t brute_slab_count(std::span<const Vec3> cloud, double half_width, int axis);

/// Nearest point per quadrant within `child_distance`, candidates restricted
/// to the extended neighborhood of cloud[p]; ties to the smaller index.
std::array<std::optional<std::size_t>, 8> brute_octree_children(std::size_t p,
                                                               std::span<const Vec3> cloud,
                                                               double half_width,
                                                               double child_distance);

/// Breadth-first expansion to depth n over a directed child graph.
std::vector<std::size_t> brute_ring(
    std::size_t p, int n, const std::vector<std::array<std::optional<std::size_t>, 8>>& children);

/// Dijkstra over the dense graph connecting points closer than `radius`.
std::optional<double> brute_geodesic(std::size_t p, std::size_t q, std::span<const Vec3> cloud,
                                     double radius);

/// Naive kernel: "const", "gauss" (with sigma) or a learned network given by
/// its raw layers.
struct NaiveKernel {
  enum class Kind { Constant, Gaussian, Learned } kind = Kind::Constant;
  double sigma = 1.0;
  std::vector<DenseLayer> layers;
};

std::vector<double> naive_convolution(const Vec3& center, std::span<const Vec3> member_positions,
                                      std::span<const Feature> member_features,
                                      const NaiveKernel& kernel);

struct RedBlackReport {
  bool ok = true;
  std::string reason;
  std::size_t black_height = 0;
  std::size_t nodes = 0;
};

/// Structural walk checking BST order, interval disjointness, red-black
/// coloring and equal black height on every root-to-leaf path.
RedBlackReport validate_red_black(const CoordinateIntervalTree& tree);

}  // namespace fawcon::oracle
