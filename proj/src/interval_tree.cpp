#include "fawcon/interval_tree.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace fawcon {

CoordinateIntervalTree::CoordinateIntervalTree(double half_width, bool precreate_neighbors)
    : half_width_(half_width), precreate_neighbors_(precreate_neighbors) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw DomainError("interval half width must be positive and finite");
  }
}

double CoordinateIntervalTree::slab_min(std::int64_t key) const {
  return origin_ + (2.0 * static_cast<double>(key) - 1.0) * half_width_;
}

std::optional<std::int64_t> CoordinateIntervalTree::key_of(double coordinate) const {
  if (!anchored_ || !std::isfinite(coordinate)) return std::nullopt;
  auto k = static_cast<std::int64_t>(
      std::floor((coordinate - origin_ + half_width_) / (2.0 * half_width_)));
  // The division can land one slab off near a boundary; settle on the slab
  // whose stored bounds actually contain the coordinate.
  while (coordinate < slab_min(k)) --k;
  while (coordinate >= slab_min(k + 1)) ++k;
  return k;
}

std::optional<CoordinateIntervalTree::Handle> CoordinateIntervalTree::locate(
    double coordinate) const {
  Handle h = root_;
  while (h != kNil) {
    const Node& n = nodes_[h];
    if (coordinate < n.min) {
      h = n.left;
    } else if (coordinate >= n.max) {
      h = n.right;
    } else {
      return h;
    }
  }
  return std::nullopt;
}

std::optional<CoordinateIntervalTree::Handle> CoordinateIntervalTree::find_key(
    std::int64_t key) const {
  Handle h = root_;
  while (h != kNil) {
    const Node& n = nodes_[h];
    if (key < n.key) {
      h = n.left;
    } else if (key > n.key) {
      h = n.right;
    } else {
      return h;
    }
  }
  return std::nullopt;
}

CoordinateIntervalTree::Handle CoordinateIntervalTree::insert(PointId p, double coordinate) {
  if (!std::isfinite(coordinate)) throw DomainError("coordinate must be finite");
  if (!anchored_) {
    anchored_ = true;
    origin_ = coordinate;
  }

  Handle target;
  if (auto found = locate(coordinate)) {
    target = *found;
  } else {
    const std::int64_t key = *key_of(coordinate);
    target = create_node(key);
    if (precreate_neighbors_) {
      if (!find_key(key - 1)) create_node(key - 1);
      if (!find_key(key + 1)) create_node(key + 1);
    }
  }

  auto& points = nodes_[target].points;
  if (points.empty() || points.back() < p) {
    points.push_back(p);
  } else {
    points.insert(std::lower_bound(points.begin(), points.end(), p), p);
  }
  return target;
}

CoordinateIntervalTree::Handle CoordinateIntervalTree::create_node(std::int64_t key) {
  const auto z = static_cast<Handle>(nodes_.size());
  Node fresh;
  fresh.key = key;
  fresh.min = slab_min(key);
  fresh.max = slab_min(key + 1);
  nodes_.push_back(std::move(fresh));

  // Descend to the leaf position; the final parent is the in-order neighbour
  // whose interval is closest to the new one.
  Handle parent = kNil;
  Handle cur = root_;
  while (cur != kNil) {
    parent = cur;
    cur = key < nodes_[cur].key ? nodes_[cur].left : nodes_[cur].right;
  }
  nodes_[z].parent = parent;
  if (parent == kNil) {
    root_ = z;
  } else if (key < nodes_[parent].key) {
    nodes_[parent].left = z;
  } else {
    nodes_[parent].right = z;
  }
  insert_fixup(z);
  return z;
}

void CoordinateIntervalTree::rotate_left(Handle x) {
  const Handle y = nodes_[x].right;
  nodes_[x].right = nodes_[y].left;
  if (nodes_[y].left != kNil) nodes_[nodes_[y].left].parent = x;
  nodes_[y].parent = nodes_[x].parent;
  const Handle xp = nodes_[x].parent;
  if (xp == kNil) {
    root_ = y;
  } else if (nodes_[xp].left == x) {
    nodes_[xp].left = y;
  } else {
    nodes_[xp].right = y;
  }
  nodes_[y].left = x;
  nodes_[x].parent = y;
}

void CoordinateIntervalTree::rotate_right(Handle x) {
  const Handle y = nodes_[x].left;
  nodes_[x].left = nodes_[y].right;
  if (nodes_[y].right != kNil) nodes_[nodes_[y].right].parent = x;
  nodes_[y].parent = nodes_[x].parent;
  const Handle xp = nodes_[x].parent;
  if (xp == kNil) {
    root_ = y;
  } else if (nodes_[xp].right == x) {
    nodes_[xp].right = y;
  } else {
    nodes_[xp].left = y;
  }
  nodes_[y].right = x;
  nodes_[x].parent = y;
}

void CoordinateIntervalTree::insert_fixup(Handle z) {
  while (color_of(nodes_[z].parent) == Color::Red) {
    Handle zp = nodes_[z].parent;
    Handle zpp = nodes_[zp].parent;  // exists: a red parent is never the root
    if (zp == nodes_[zpp].left) {
      const Handle uncle = nodes_[zpp].right;
      if (color_of(uncle) == Color::Red) {
        nodes_[zp].color = Color::Black;
        nodes_[uncle].color = Color::Black;
        nodes_[zpp].color = Color::Red;
        z = zpp;
        continue;
      }
      if (z == nodes_[zp].right) {
        z = zp;
        rotate_left(z);
        zp = nodes_[z].parent;
        zpp = nodes_[zp].parent;
      }
      nodes_[zp].color = Color::Black;
      nodes_[zpp].color = Color::Red;
      rotate_right(zpp);
    } else {
      const Handle uncle = nodes_[zpp].left;
      if (color_of(uncle) == Color::Red) {
        nodes_[zp].color = Color::Black;
        nodes_[uncle].color = Color::Black;
        nodes_[zpp].color = Color::Red;
        z = zpp;
        continue;
      }
      if (z == nodes_[zp].left) {
        z = zp;
        rotate_right(z);
        zp = nodes_[z].parent;
        zpp = nodes_[zp].parent;
      }
      nodes_[zp].color = Color::Black;
      nodes_[zpp].color = Color::Red;
      rotate_left(zpp);
    }
  }
  nodes_[root_].color = Color::Black;
}

std::size_t CoordinateIntervalTree::height() const {
  if (root_ == kNil) return 0;
  std::size_t best = 0;
  std::vector<std::pair<Handle, std::size_t>> stack{{root_, 1}};
  while (!stack.empty()) {
    auto [h, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    if (nodes_[h].left != kNil) stack.emplace_back(nodes_[h].left, depth + 1);
    if (nodes_[h].right != kNil) stack.emplace_back(nodes_[h].right, depth + 1);
  }
  return best;
}

std::vector<CoordinateIntervalTree::Handle> CoordinateIntervalTree::in_order() const {
  std::vector<Handle> out;
  out.reserve(nodes_.size());
  std::vector<Handle> stack;
  Handle cur = root_;
  while (cur != kNil || !stack.empty()) {
    while (cur != kNil) {
      stack.push_back(cur);
      cur = nodes_[cur].left;
    }
    cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    cur = nodes_[cur].right;
  }
  return out;
}

}  // namespace fawcon
