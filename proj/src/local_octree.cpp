#include "fawcon/local_octree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <utility>

namespace fawcon {

std::size_t PointOctree::child_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(children.begin(), children.end(), [](const auto& c) { return c.has_value(); }));
}

OctreeForest::OctreeForest(OctreeConfig config) : config_(config) {
  if (!(config_.child_distance > 0.0)) throw DomainError("child distance must be positive");
  if (config_.early_finish && !(config_.early_finish_distance > 0.0)) {
    throw DomainError("early-finish distance must be positive");
  }
}

PointOctree& OctreeForest::slot(PointId p) {
  const std::size_t i = index_of(p);
  if (i >= trees_.size()) {
    trees_.resize(i + 1);
    built_.resize(i + 1, false);
  }
  return trees_[i];
}

const PointOctree& OctreeForest::at(PointId p) const {
  if (!contains(p)) throw NotFoundError("no octree for point " + std::to_string(index_of(p)));
  return trees_[index_of(p)];
}

PointOctree OctreeForest::search(PointId p, const GlobalIndex& index) const {
  const Vec3& center = index.position(p);
  const std::vector<PointId> pool = index.extended_neighborhood(center);

  if (config_.early_finish) {
    const double merge2 = config_.early_finish_distance * config_.early_finish_distance;
    for (PointId q : pool) {
      if (q == p || !contains(q)) continue;
      if (squared_norm(index.position(q) - center) < merge2) {
        PointOctree copy = trees_[index_of(q)];
        for (int m = 0; m < 8; ++m) {
          if (!copy.children[m]) continue;
          if (*copy.children[m] == p) copy.children[m] = q;
          copy.child_distance[m] = distance(index.position(*copy.children[m]), center);
        }
        return copy;
      }
    }
  }

  PointOctree tree;
  std::array<double, 8> best2;
  best2.fill(PointOctree::kEmpty);
  const double limit2 = config_.child_distance * config_.child_distance;
  // Ascending ids plus strict < keeps the smaller id on distance ties.
  for (PointId q : pool) {
    if (q == p) continue;
    const Vec3 delta = index.position(q) - center;
    const double d2 = squared_norm(delta);
    if (d2 > limit2) continue;
    const int m = quadrant_of(delta);
    if (d2 < best2[m]) {
      best2[m] = d2;
      tree.children[m] = q;
    }
  }
  for (int m = 0; m < 8; ++m) {
    if (tree.children[m]) tree.child_distance[m] = std::sqrt(best2[m]);
  }
  return tree;
}

const PointOctree& OctreeForest::build(PointId p, const GlobalIndex& index) {
  if (!index.contains(p)) {
    throw NotFoundError("point " + std::to_string(index_of(p)) + " is not in the global index");
  }
  PointOctree tree = search(p, index);
  PointOctree& dst = slot(p);
  dst = tree;
  built_[index_of(p)] = true;
  return dst;
}

bool OctreeForest::offer(PointId center, PointId candidate, const GlobalIndex& index) {
  PointOctree& tree = trees_[index_of(center)];
  const Vec3& origin = index.position(center);
  const Vec3 delta = index.position(candidate) - origin;
  const double d2 = squared_norm(delta);
  if (d2 > config_.child_distance * config_.child_distance) return false;
  const int m = quadrant_of(delta);
  if (tree.children[m]) {
    const PointId current = *tree.children[m];
    const double current2 = squared_norm(index.position(current) - origin);
    if (d2 > current2 || (d2 == current2 && current < candidate)) return false;
  }
  tree.children[m] = candidate;
  tree.child_distance[m] = std::sqrt(d2);
  return true;
}

std::vector<PointId> OctreeForest::rebuild_affected(PointId q, const GlobalIndex& index) {
  if (!index.contains(q)) {
    throw NotFoundError("point " + std::to_string(index_of(q)) + " is not in the global index");
  }
  const std::vector<PointId> pool = index.extended_neighborhood(index.position(q));
  std::vector<PointId> changed;
  build(q, index);
  for (PointId r : pool) {
    if (r == q) {
      changed.push_back(q);
    } else if (config_.early_finish || !contains(r)) {
      const std::optional<PointOctree> before =
          contains(r) ? std::optional<PointOctree>(trees_[index_of(r)]) : std::nullopt;
      if (build(r, index) != before) changed.push_back(r);
    } else if (offer(r, q, index)) {
      // Points are only ever added, so the new nearest-per-quadrant is the
      // old child or q; this equals a from-scratch rebuild.
      changed.push_back(r);
    }
  }
  return changed;
}

void OctreeForest::rebuild_all(const GlobalIndex& index) {
  trees_.clear();
  built_.clear();
  for (std::size_t i = 0; i < index.id_bound(); ++i) {
    if (index.contains(point_id(i))) build(point_id(i), index);
  }
}

RingSet OctreeForest::ring(PointId p, int n) const {
  if (n < 1) throw DomainError("ring order must be >= 1");
  at(p);
  RingSet out{p, n, {p}};
  std::vector<PointId> frontier{p};
  std::vector<char> seen(trees_.size(), 0);
  seen[index_of(p)] = 1;
  for (int depth = 0; depth < n && !frontier.empty(); ++depth) {
    std::vector<PointId> next;
    for (PointId r : frontier) {
      if (!contains(r)) continue;
      for (const auto& child : trees_[index_of(r)].children) {
        if (!child) continue;
        const std::size_t c = index_of(*child);
        if (c < seen.size() && !seen[c]) {
          seen[c] = 1;
          next.push_back(*child);
          out.members.push_back(*child);
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

OctreeGraph::OctreeGraph(const OctreeForest& forest, const GlobalIndex& index)
    : adjacency_(forest.size()) {
  for (std::size_t i = 0; i < forest.size(); ++i) {
    const PointId u = point_id(i);
    if (!forest.contains(u)) continue;
    const PointOctree& tree = forest.at(u);
    for (int m = 0; m < 8; ++m) {
      if (!tree.children[m]) continue;
      const PointId v = *tree.children[m];
      const double len = distance(index.position(u), index.position(v));
      if (index_of(v) >= adjacency_.size()) adjacency_.resize(index_of(v) + 1);
      adjacency_[i].push_back({v, len});
      adjacency_[index_of(v)].push_back({u, len});
    }
  }
}

std::optional<TracedPath> OctreeGraph::shortest_path(PointId p, PointId q) const {
  const std::size_t n = adjacency_.size();
  if (index_of(p) >= n || index_of(q) >= n) {
    throw NotFoundError("path endpoint is not part of the octree graph");
  }
  if (p == q) return TracedPath{{p}, 0.0};

  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> prev(n, kNone);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  dist[index_of(p)] = 0.0;
  open.emplace(0.0, index_of(p));
  while (!open.empty()) {
    auto [d, u] = open.top();
    open.pop();
    if (d > dist[u]) continue;
    if (u == index_of(q)) break;
    for (const Edge& e : adjacency_[u]) {
      const std::size_t v = index_of(e.to);
      const double nd = d + e.length;
      if (nd < dist[v]) {
        dist[v] = nd;
        prev[v] = u;
        open.emplace(nd, v);
      }
    }
  }
  if (prev[index_of(q)] == kNone) return std::nullopt;

  TracedPath path;
  path.length = dist[index_of(q)];
  for (std::size_t v = index_of(q); v != kNone; v = prev[v]) path.points.push_back(point_id(v));
  std::reverse(path.points.begin(), path.points.end());
  return path;
}

std::optional<TracedPath> trace_path(const OctreeForest& forest, const GlobalIndex& index,
                                     PointId p, PointId q) {
  forest.at(p);
  forest.at(q);
  return OctreeGraph(forest, index).shortest_path(p, q);
}

}  // namespace fawcon
