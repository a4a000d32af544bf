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

DooResult doo_run(Budget budget, const DooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim) {
  if (!(p.nu1 > 0.0) || !(p.rho > 0.0 && p.rho < 1.0)) {
    throw std::invalid_argument("doo_run: need nu1 > 0 and rho in (0, 1)");
  }
  DooResult out;
  out.tree = PartitionTree(dim);
  if (budget.n_used >= budget.n_max) return out;

  eval_center(out.tree, out.tree.root(), f, budget, critical_threshold,
              out.records);

  while (budget.n_used < budget.n_max) {
    PartitionTree::NodeId best = -1;
    double best_b = -std::numeric_limits<double>::infinity();
    int best_h = 0;
    std::uint64_t best_i = 0;
    for (PartitionTree::NodeId id : out.tree.leaves()) {
      const auto& n = out.tree.node(id);
      if (!n.value || !out.tree.splittable(id)) continue;
      const double b = *n.value + p.nu1 * std::pow(p.rho, n.depth);
      const bool wins =
          best < 0 || b > best_b ||
          (b == best_b &&
           (n.depth < best_h || (n.depth == best_h && n.index < best_i)));
      if (wins) {
        best = id;
        best_b = b;
        best_h = n.depth;
        best_i = n.index;
      }
    }
    if (best < 0) break;  // every valued leaf sits at the depth cap

    auto [lo, hi] = out.tree.split(best);
    eval_center(out.tree, lo, f, budget, critical_threshold, out.records);
    if (budget.n_used >= budget.n_max) break;
    eval_center(out.tree, hi, f, budget, critical_threshold, out.records);
  }
  return out;
}

}  // namespace critsearch
