#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "critsearch/criticality.hpp"

namespace critsearch {

/// Axis-aligned box inside the unit cube.
struct Cell {
  std::vector<double> lo;
  std::vector<double> hi;
};

UnitPoint cell_center(const Cell& c);

/// Half-open membership [lo, hi) per axis; cells touching the upper
/// boundary of the unit cube are closed there, so every point of
/// [0,1]^d belongs to exactly one leaf of any partition.
bool cell_contains(const Cell& c, const UnitPoint& u);

/// Uniform sample, guaranteed to satisfy cell_contains.
UnitPoint cell_sample_uniform(const Cell& c, std::mt19937_64& rng);

/// Binary partition tree over [0,1]^d. A split halves the longest side
/// at its midpoint (ties resolved toward the smallest axis index); the
/// lower half becomes the first child. Nodes are addressed by (depth h,
/// index i) with i in [1, 2^h]; the children of (h, i) are (h+1, 2i-1)
/// and (h+1, 2i).
///
/// Every node carries both the visit statistics used by stochastic
/// optimizers and the center-value slot used by deterministic ones;
/// whichever a given algorithm does not use simply stays empty.
class PartitionTree {
 public:
  using NodeId = std::int32_t;

  /// Depth bound keeping (h, i) addressable in 64 bits. At the budgets
  /// this tool targets no search comes near it.
  static constexpr int kMaxDepth = 62;

  struct Node {
    int depth = 0;
    std::uint64_t index = 1;  // 1-based position within the depth level
    Cell cell;
    NodeId parent = -1;
    NodeId child_lo = -1;  // lower half
    NodeId child_hi = -1;  // upper half

    long visits = 0;          // T: plays through this node
    double reward_sum = 0.0;  // sum of observed values
    long plays_as_leaf = 0;   // plays received while this was the leaf
    double u_value = std::numeric_limits<double>::infinity();
    double b_value = std::numeric_limits<double>::infinity();
    std::optional<double> value;  // objective at the cell center

    bool is_leaf() const { return child_lo < 0; }
    double mean_reward() const {
      return visits > 0 ? reward_sum / static_cast<double>(visits) : 0.0;
    }
  };

  explicit PartitionTree(std::size_t dim = 2);

  NodeId root() const { return 0; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  Node& node(NodeId id) { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t dim() const { return dim_; }
  int max_depth() const { return max_depth_; }

  bool splittable(NodeId id) const {
    return nodes_[id].is_leaf() && nodes_[id].depth < kMaxDepth;
  }

  /// Splits a leaf; returns (lower child, upper child). Throws
  /// std::logic_error on a non-leaf or at the depth bound.
  std::pair<NodeId, NodeId> split(NodeId id);

  std::vector<NodeId> leaves() const;

  /// Leaf containing u (descent by the half-open rule).
  NodeId locate(const UnitPoint& u) const;

  /// One line per node: "h i lo0 lo1 hi0 hi1 T mean value".
  void dump(std::ostream& os) const;

 private:
  std::vector<Node> nodes_;
  std::size_t dim_;
  int max_depth_ = 0;
};

}  // namespace critsearch
