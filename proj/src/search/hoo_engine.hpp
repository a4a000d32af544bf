#pragma once

// Internal HOO round engine shared by the standalone optimizer and the
// parallel-instance wrapper. The caller supplies the leaf evaluation,
// which lets the wrapper route requests through its shared cache while
// keeping a single-instance run identical to the standalone one.

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "critsearch/search.hpp"

namespace critsearch::detail {

inline std::mt19937_64 make_rng(std::uint64_t seed, int stream) {
  std::seed_seq seq{static_cast<std::uint64_t>(seed),
                    static_cast<std::uint64_t>(stream)};
  return std::mt19937_64(seq);
}

class HooEngine {
 public:
  HooEngine(std::size_t dim, double nu1, double rho, std::uint64_t seed,
            int stream, std::vector<HooAuditRound>* audit = nullptr)
      : tree_(dim),
        rng_(make_rng(seed, stream)),
        nu1_(nu1),
        rho_(rho),
        audit_(audit) {}

  /// One play. `eval` receives the reached leaf and the instance rng
  /// and returns the sampled point with its value, or std::nullopt if
  /// no evaluation can be afforded; in that case nothing is mutated.
  template <class EvalFn>
  bool round(EvalFn&& eval) {
    path_.clear();
    PartitionTree::NodeId cur = tree_.root();
    path_.push_back(cur);
    HooAuditRound ar;
    while (!tree_.node(cur).is_leaf()) {
      const auto lo = tree_.node(cur).child_lo;
      const auto hi = tree_.node(cur).child_hi;
      const double b_lo = tree_.node(lo).b_value;
      const double b_hi = tree_.node(hi).b_value;
      PartitionTree::NodeId pick;
      if (b_lo > b_hi) {
        pick = lo;
      } else if (b_hi > b_lo) {
        pick = hi;
      } else {
        pick = (rng_() & 1u) ? hi : lo;
      }
      if (audit_) {
        ar.chosen_b.push_back(pick == lo ? b_lo : b_hi);
        ar.sibling_b.push_back(pick == lo ? b_hi : b_lo);
      }
      cur = pick;
      path_.push_back(cur);
    }

    auto result = eval(cur, rng_);
    if (!result) return false;
    const double kappa = result->second;

    tree_.node(cur).plays_as_leaf += 1;
    if (tree_.splittable(cur)) tree_.split(cur);
    ++n_total_;

    for (auto it = path_.rbegin(); it != path_.rend(); ++it) {
      auto& n = tree_.node(*it);
      n.visits += 1;
      n.reward_sum += kappa;
      n.u_value =
          hoo_u_value(n.visits, n.reward_sum, n_total_, n.depth, nu1_, rho_);
      if (n.is_leaf()) {
        n.b_value = n.u_value;
      } else {
        const double b_lo = tree_.node(n.child_lo).b_value;
        const double b_hi = tree_.node(n.child_hi).b_value;
        n.b_value = std::min(n.u_value, std::max(b_lo, b_hi));
      }
    }

    if (audit_) {
      ar.path = path_;
      audit_->push_back(std::move(ar));
    }
    return true;
  }

  const PartitionTree& tree() const { return tree_; }
  PartitionTree& tree() { return tree_; }
  long n_total() const { return n_total_; }

 private:
  PartitionTree tree_;
  std::mt19937_64 rng_;
  double nu1_;
  double rho_;
  long n_total_ = 0;
  std::vector<PartitionTree::NodeId> path_;
  std::vector<HooAuditRound>* audit_;
};

}  // namespace critsearch::detail
