#include "fawcon/global_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fawcon {

GlobalIndex::GlobalIndex(GlobalIndexConfig config)
    : config_(config),
      trees_{CoordinateIntervalTree(config.half_width, config.precreate_neighbors),
             CoordinateIntervalTree(config.half_width, config.precreate_neighbors),
             CoordinateIntervalTree(config.half_width, config.precreate_neighbors)} {
  if (!(config_.merge_distance >= 0.0) || !(config_.merge_distance < config_.half_width)) {
    throw DomainError("merge distance must satisfy 0 <= delta < h");
  }
}

GlobalIndex::Handles GlobalIndex::insert(PointId p, const Vec3& position) {
  if (contains(p)) {
    throw AlreadyInsertedError("point " + std::to_string(index_of(p)) + " already inserted");
  }
  if (!is_finite(position)) throw DomainError("point position must be finite");

  const std::size_t i = index_of(p);
  if (i >= inserted_.size()) {
    inserted_.resize(i + 1, false);
    positions_.resize(i + 1);
    keys_.resize(i + 1);
  }
  Handles handles{};
  for (int a = 0; a < 3; ++a) {
    handles[a] = trees_[a].insert(p, position[a]);
    keys_[i][a] = trees_[a].node(handles[a]).key;
  }
  positions_[i] = position;
  inserted_[i] = true;
  ++count_;
  return handles;
}

std::optional<CoordinateIntervalTree::Handle> GlobalIndex::locate(Axis axis,
                                                                  double coordinate) const {
  return tree(axis).locate(coordinate);
}

std::vector<PointId> GlobalIndex::neighborhood(const Vec3& q) const {
  std::array<const CoordinateIntervalTree::Node*, 3> slabs{};
  for (int a = 0; a < 3; ++a) {
    auto h = trees_[a].locate(q[a]);
    if (!h) return {};
    slabs[a] = &trees_[a].node(*h);
  }
  int smallest = 0;
  for (int a = 1; a < 3; ++a) {
    if (slabs[a]->points.size() < slabs[smallest]->points.size()) smallest = a;
  }
  std::vector<PointId> out;
  for (PointId p : slabs[smallest]->points) {
    const auto& k = keys_[index_of(p)];
    if (k[0] == slabs[0]->key && k[1] == slabs[1]->key && k[2] == slabs[2]->key) {
      out.push_back(p);
    }
  }
  return out;
}

std::vector<PointId> GlobalIndex::block(const Vec3& q, std::int64_t reach) const {
  std::array<std::int64_t, 3> center{};
  for (int a = 0; a < 3; ++a) {
    auto k = trees_[a].key_of(q[a]);
    if (!k) return {};
    center[a] = *k;
  }

  // Pick the axis whose run of slabs holds the fewest points.
  std::array<std::vector<const CoordinateIntervalTree::Node*>, 3> runs;
  std::array<std::size_t, 3> totals{};
  for (int a = 0; a < 3; ++a) {
    for (std::int64_t k = center[a] - reach; k <= center[a] + reach; ++k) {
      if (auto h = trees_[a].find_key(k)) {
        const auto& node = trees_[a].node(*h);
        runs[a].push_back(&node);
        totals[a] += node.points.size();
      }
    }
  }
  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (totals[a] < totals[axis]) axis = a;
  }

  std::vector<PointId> out;
  out.reserve(totals[axis]);
  for (const auto* node : runs[axis]) {
    for (PointId p : node->points) {
      const auto& k = keys_[index_of(p)];
      bool inside = true;
      for (int a = 0; a < 3 && inside; ++a) {
        if (a != axis) inside = k[a] >= center[a] - reach && k[a] <= center[a] + reach;
      }
      if (inside) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PointId> GlobalIndex::extended_neighborhood(const Vec3& q) const {
  return block(q, 1);
}

std::vector<PointId> GlobalIndex::ball(const Vec3& q, double radius) const {
  if (!(radius >= 0.0)) return {};
  const auto reach =
      static_cast<std::int64_t>(std::ceil(radius / (2.0 * config_.half_width))) + 1;
  std::vector<PointId> candidates = block(q, reach);
  const double r2 = radius * radius;
  std::erase_if(candidates,
                [&](PointId p) { return squared_norm(positions_[index_of(p)] - q) > r2; });
  return candidates;
}

std::optional<PointId> GlobalIndex::correspond(const Vec3& q) const {
  std::optional<PointId> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  const double limit = config_.merge_distance * config_.merge_distance;
  // Candidates arrive in ascending id order, so strict < keeps the smaller id on ties.
  for (PointId p : extended_neighborhood(q)) {
    const double d2 = squared_norm(positions_[index_of(p)] - q);
    if (d2 <= limit && d2 < best_d2) {
      best_d2 = d2;
      best = p;
    }
  }
  return best;
}

}  // namespace fawcon
