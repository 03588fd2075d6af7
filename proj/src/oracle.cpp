#include "fawcon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace fawcon::oracle {

std::int64_t Lattice::key(double coordinate, int axis) const {
  const double o = origin[axis];
  const double h = half_width;
  auto lower = [&](std::int64_t k) { return o + (2.0 * static_cast<double>(k) - 1.0) * h; };
  auto k = static_cast<std::int64_t>(std::llround((coordinate - o) / (2.0 * h)));
  while (!(coordinate >= lower(k))) --k;
  while (!(coordinate < lower(k + 1))) ++k;
  return k;
}

Lattice lattice_for(std::span<const Vec3> cloud, double half_width) {
  Lattice lat;
  lat.half_width = half_width;
  if (!cloud.empty()) lat.origin = cloud.front();
  return lat;
}

namespace {

bool within_block(const Lattice& lat, const Vec3& a, const Vec3& b, std::int64_t reach) {
  for (int axis = 0; axis < 3; ++axis) {
    const std::int64_t d = lat.key(a[axis], axis) - lat.key(b[axis], axis);
    if (d < -reach || d > reach) return false;
  }
  return true;
}

}  // namespace

std::vector<std::size_t> brute_neighborhood(const Vec3& q, std::span<const Vec3> cloud,
                                            double half_width) {
  std::vector<std::size_t> out;
  if (cloud.empty()) return out;
  const Lattice lat = lattice_for(cloud, half_width);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (within_block(lat, cloud[i], q, 0)) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> brute_extended_neighborhood(const Vec3& q, std::span<const Vec3> cloud,
                                                     double half_width) {
  std::vector<std::size_t> out;
  if (cloud.empty()) return out;
  const Lattice lat = lattice_for(cloud, half_width);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (within_block(lat, cloud[i], q, 1)) out.push_back(i);
  }
  return out;
}

std::optional<std::size_t> brute_correspond(const Vec3& q, std::span<const Vec3> cloud,
                                            double merge_distance) {
  std::optional<std::size_t> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double dx = cloud[i][0] - q[0], dy = cloud[i][1] - q[1], dz = cloud[i][2] - q[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 <= merge_distance * merge_distance && d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

std::size_t brute_slab_count(std::span<const Vec3> cloud, double half_width, int axis) {
  const Lattice lat = lattice_for(cloud, half_width);
  std::set<std::int64_t> keys;
  for (const auto& p : cloud) keys.insert(lat.key(p[axis], axis));
  return keys.size();
}

std::array<std::optional<std::size_t>, 8> brute_octree_children(std::size_t p,
                                                               std::span<const Vec3> cloud,
                                                               double half_width,
                                                               double child_distance) {
  std::array<std::optional<std::size_t>, 8> children{};
  std::array<double, 8> best;
  best.fill(std::numeric_limits<double>::infinity());
  const Lattice lat = lattice_for(cloud, half_width);
  const Vec3& c = cloud[p];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (i == p) continue;
    const double dx = cloud[i][0] - c[0], dy = cloud[i][1] - c[1], dz = cloud[i][2] - c[2];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 > child_distance * child_distance || !within_block(lat, cloud[i], c, 1)) continue;
    int quadrant = 0;
    if (!(dx < 0.0)) quadrant += 1;
    if (!(dy < 0.0)) quadrant += 2;
    if (!(dz < 0.0)) quadrant += 4;
    if (d2 < best[quadrant]) {
      best[quadrant] = d2;
      children[quadrant] = i;
    }
  }
  return children;
}

std::vector<std::size_t> brute_ring(
    std::size_t p, int n,
    const std::vector<std::array<std::optional<std::size_t>, 8>>& children) {
  std::set<std::size_t> members{p};
  std::vector<std::size_t> level{p};
  for (int depth = 0; depth < n; ++depth) {
    std::vector<std::size_t> next;
    for (std::size_t r : level) {
      for (const auto& c : children[r]) {
        if (c && members.insert(*c).second) next.push_back(*c);
      }
    }
    level = next;
  }
  return {members.begin(), members.end()};
}

std::optional<double> brute_geodesic(std::size_t p, std::size_t q, std::span<const Vec3> cloud,
                                     double radius) {
  const std::size_t n = cloud.size();
  if (p == q) return 0.0;
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> done(n, false);
  dist[p] = 0.0;
  // O(n^2) array Dijkstra on the implicit dense graph.
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && (u == n || dist[i] < dist[u])) u = i;
    }
    if (u == n || std::isinf(dist[u])) break;
    if (u == q) return dist[u];
    done[u] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double d = distance(cloud[u], cloud[v]);
      if (d <= radius && dist[u] + d < dist[v]) dist[v] = dist[u] + d;
    }
  }
  return std::nullopt;
}

std::vector<double> naive_convolution(const Vec3& center, std::span<const Vec3> member_positions,
                                      std::span<const Feature> member_features,
                                      const NaiveKernel& kernel) {
  const std::size_t dim = member_features.empty() ? 0 : member_features.front().size();
  std::vector<double> out(dim, 0.0);
  for (std::size_t m = 0; m < member_positions.size(); ++m) {
    const double dx = member_positions[m][0] - center[0];
    const double dy = member_positions[m][1] - center[1];
    const double dz = member_positions[m][2] - center[2];
    std::vector<double> w(dim, 1.0);
    if (kernel.kind == NaiveKernel::Kind::Gaussian) {
      const double g = std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * kernel.sigma * kernel.sigma));
      std::fill(w.begin(), w.end(), g);
    } else if (kernel.kind == NaiveKernel::Kind::Learned) {
      std::vector<double> act{dx, dy, dz};
      for (std::size_t l = 0; l < kernel.layers.size(); ++l) {
        const DenseLayer& layer = kernel.layers[l];
        std::vector<double> next(layer.outputs);
        for (std::size_t o = 0; o < layer.outputs; ++o) {
          double s = layer.bias[o];
          for (std::size_t i = 0; i < layer.inputs; ++i) {
            s += layer.weights[o * layer.inputs + i] * act[i];
          }
          next[o] = (l + 1 < kernel.layers.size() && s < 0.0) ? 0.0 : s;
        }
        act = next;
      }
      w = act;
    }
    for (std::size_t i = 0; i < dim; ++i) out[i] += w[i] * member_features[m][i];
  }
  return out;
}

namespace {

using Handle = CoordinateIntervalTree::Handle;
using Color = CoordinateIntervalTree::Color;
constexpr Handle kNil = CoordinateIntervalTree::kNil;

// Returns black height of the subtree, or nullopt (with reason) on violation.
std::optional<std::size_t> walk(const CoordinateIntervalTree& tree, Handle h, Handle parent,
                                 const double* lo, const double* hi, RedBlackReport& report) {
  if (h == kNil) return 1;
  const auto& n = tree.node(h);
  ++report.nodes;
  if (n.parent != parent) {
    report.reason = "broken parent link at key " + std::to_string(n.key);
    return std::nullopt;
  }
  if (!(n.min < n.max)) {
    report.reason = "empty interval at key " + std::to_string(n.key);
    return std::nullopt;
  }
  if ((lo && n.min < *lo) || (hi && n.max > *hi)) {
    report.reason = "interval order violated at key " + std::to_string(n.key);
    return std::nullopt;
  }
  if (n.color == Color::Red) {
    for (Handle c : {n.left, n.right}) {
      if (c != kNil && tree.node(c).color == Color::Red) {
        report.reason = "red node with red child at key " + std::to_string(n.key);
        return std::nullopt;
      }
    }
  }
  auto left = walk(tree, n.left, h, lo, &n.min, report);
  if (!left) return std::nullopt;
  auto right = walk(tree, n.right, h, &n.max, hi, report);
  if (!right) return std::nullopt;
  if (*left != *right) {
    report.reason = "unequal black height below key " + std::to_string(n.key);
    return std::nullopt;
  }
  return *left + (n.color == Color::Black ? 1 : 0);
}

}  // namespace

RedBlackReport validate_red_black(const CoordinateIntervalTree& tree) {
  RedBlackReport report;
  const Handle root = tree.root();
  if (root != kNil && tree.node(root).color != Color::Black) {
    report.ok = false;
    report.reason = "root is red";
    return report;
  }
  auto bh = walk(tree, root, kNil, nullptr, nullptr, report);
  if (!bh) {
    report.ok = false;
    return report;
  }
  if (report.nodes != tree.node_count()) {
    report.ok = false;
    report.reason = "unreachable nodes";
    return report;
  }
  report.black_height = *bh;
  return report;
}

}  // namespace fawcon::oracle
