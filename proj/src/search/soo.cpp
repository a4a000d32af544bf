#include <cmath>
#include <limits>
#include <stdexcept>

#include "critsearch/search.hpp"

namespace critsearch {

namespace {

void eval_center(PartitionTree& tree, PartitionTree::NodeId id,
                 const SearchObjective& f, Budget& budget,
                 double critical_threshold, std::vector<EvalRecord>& records) {
  auto& node = tree.node(id);
  UnitPoint u = cell_center(node.cell);
  const double kappa = f(u);
  ++budget.n_used;
  node.value = kappa;
  records.push_back({budget.n_used, std::move(u), kappa,
                     kappa >= critical_threshold,
                     NodeRef{node.depth, node.index}, std::nullopt});
}

}  // namespace

SooResult soo_run(Budget budget, const SooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim) {
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) {
    throw std::invalid_argument("soo_run: epsilon must be in (0, 1]");
  }
  SooResult out;
  out.tree = PartitionTree(dim);
  if (budget.n_used >= budget.n_max) return out;

  eval_center(out.tree, out.tree.root(), f, budget, critical_threshold,
              out.records);

  long splits_done = 0;
  while (budget.n_used < budget.n_max) {
    bool progressed = false;
    double v_max = -std::numeric_limits<double>::infinity();
    // Depth window: the tree depth term is pinned at sweep start, so
    // one sweep deepens the tree by at most one level; the t^epsilon
    // cap tracks t, which counts splits 1-based (the upcoming split).
    const int sweep_depth = out.tree.max_depth();
    for (int h = 0; budget.n_used < budget.n_max; ++h) {
      const double t = static_cast<double>(splits_done + 1);
      const long h_bound =
          static_cast<long>(std::floor(std::pow(t, p.epsilon) + 1e-9));
      if (h > sweep_depth || h > h_bound) break;

      PartitionTree::NodeId best = -1;
      double best_v = -std::numeric_limits<double>::infinity();
      std::uint64_t best_i = 0;
      for (PartitionTree::NodeId id : out.tree.leaves()) {
        const auto& n = out.tree.node(id);
        if (n.depth != h || !n.value || !out.tree.splittable(id)) continue;
        if (best < 0 || *n.value > best_v ||
            (*n.value == best_v && n.index < best_i)) {
          best = id;
          best_v = *n.value;
          best_i = n.index;
        }
      }
      if (best < 0 || best_v < v_max) continue;

      auto [lo, hi] = out.tree.split(best);
      ++splits_done;
      v_max = best_v;
      progressed = true;
      eval_center(out.tree, lo, f, budget, critical_threshold, out.records);
      if (budget.n_used >= budget.n_max) break;
      eval_center(out.tree, hi, f, budget, critical_threshold, out.records);
    }
    if (!progressed) break;  // nothing admissible at any depth: give up
  }
  return out;
}

}  // namespace critsearch
