#include "critsearch/partition_tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

namespace critsearch {

UnitPoint cell_center(const Cell& c) {
  UnitPoint m(c.lo.size());
  for (std::size_t k = 0; k < c.lo.size(); ++k) {
    m[k] = 0.5 * (c.lo[k] + c.hi[k]);
  }
  return m;
}

bool cell_contains(const Cell& c, const UnitPoint& u) {
  if (u.size() != c.lo.size()) return false;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const bool inside = (u[k] >= c.lo[k] && u[k] < c.hi[k]) ||
                        (u[k] == c.hi[k] && c.hi[k] == 1.0);
    if (!inside) return false;
  }
  return true;
}

UnitPoint cell_sample_uniform(const Cell& c, std::mt19937_64& rng) {
  UnitPoint u(c.lo.size());
  for (std::size_t k = 0; k < c.lo.size(); ++k) {
    // 53-bit uniform in [0, 1); identical on every platform.
    const double f = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double x = c.lo[k] + f * (c.hi[k] - c.lo[k]);
    if (x >= c.hi[k]) x = std::nextafter(c.hi[k], c.lo[k]);
    u[k] = x;
  }
  return u;
}

PartitionTree::PartitionTree(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("PartitionTree: dim must be >= 1");
  Node root;
  root.cell.lo.assign(dim, 0.0);
  root.cell.hi.assign(dim, 1.0);
  nodes_.push_back(std::move(root));
}

std::pair<PartitionTree::NodeId, PartitionTree::NodeId> PartitionTree::split(
    NodeId id) {
  Node& n = nodes_[id];
  if (!n.is_leaf()) {
    throw std::logic_error("PartitionTree::split: node is not a leaf");
  }
  if (n.depth >= kMaxDepth) {
    throw std::logic_error("PartitionTree::split: depth bound reached");
  }

  std::size_t axis = 0;
  double longest = n.cell.hi[0] - n.cell.lo[0];
  for (std::size_t k = 1; k < dim_; ++k) {
    const double side = n.cell.hi[k] - n.cell.lo[k];
    if (side > longest) {
      longest = side;
      axis = k;
    }
  }
  const double mid = 0.5 * (n.cell.lo[axis] + n.cell.hi[axis]);

  Node lo_child;
  lo_child.depth = n.depth + 1;
  lo_child.index = 2 * n.index - 1;
  lo_child.cell = n.cell;
  lo_child.cell.hi[axis] = mid;
  lo_child.parent = id;

  Node hi_child;
  hi_child.depth = n.depth + 1;
  hi_child.index = 2 * n.index;
  hi_child.cell = n.cell;
  hi_child.cell.lo[axis] = mid;
  hi_child.parent = id;

  const NodeId lo_id = static_cast<NodeId>(nodes_.size());
  const NodeId hi_id = lo_id + 1;
  nodes_.push_back(std::move(lo_child));
  nodes_.push_back(std::move(hi_child));
  nodes_[id].child_lo = lo_id;
  nodes_[id].child_hi = hi_id;
  max_depth_ = std::max(max_depth_, nodes_[id].depth + 1);
  return {lo_id, hi_id};
}

std::vector<PartitionTree::NodeId> PartitionTree::leaves() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].is_leaf()) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

PartitionTree::NodeId PartitionTree::locate(const UnitPoint& u) const {
  if (u.size() != dim_) {
    throw std::invalid_argument("PartitionTree::locate: wrong dimension");
  }
  for (std::size_t k = 0; k < dim_; ++k) {
    if (!(u[k] >= 0.0 && u[k] <= 1.0)) {
      throw std::invalid_argument(
          "PartitionTree::locate: point outside the unit cube");
    }
  }
  NodeId id = root();
  while (!nodes_[id].is_leaf()) {
    const Node& lo = nodes_[nodes_[id].child_lo];
    // The split axis is the one where the child box differs from the
    // parent box on its upper edge.
    std::size_t axis = 0;
    for (std::size_t k = 0; k < dim_; ++k) {
      if (lo.cell.hi[k] != nodes_[id].cell.hi[k]) {
        axis = k;
        break;
      }
    }
    id = (u[axis] < lo.cell.hi[axis]) ? nodes_[id].child_lo
                                      : nodes_[id].child_hi;
  }
  return id;
}

void PartitionTree::dump(std::ostream& os) const {
  char buf[64];
  for (const auto& n : nodes_) {
    os << n.depth << ' ' << n.index;
    auto put = [&](double v) {
      std::snprintf(buf, sizeof buf, " %.9g", v);
      os << buf;
    };
    for (std::size_t k = 0; k < dim_; ++k) put(n.cell.lo[k]);
    for (std::size_t k = 0; k < dim_; ++k) put(n.cell.hi[k]);
    os << ' ' << n.visits;
    put(n.mean_reward());
    if (n.value) {
      put(*n.value);
    } else {
      os << " -";
    }
    os << '\n';
  }
}

}  // namespace critsearch
