#include <cmath>
#include <limits>
#include <stdexcept>

#include "critsearch/search.hpp"
#include "hoo_engine.hpp"

namespace critsearch {

double hoo_u_value(long visits, double reward_sum, long n_total, int depth,
                   double nu1, double rho) {
  if (visits <= 0) return std::numeric_limits<double>::infinity();
  const double mean = reward_sum / static_cast<double>(visits);
  const double width = std::sqrt(2.0 * std::log(static_cast<double>(n_total)) /
                                 static_cast<double>(visits));
  return mean + width + nu1 * std::pow(rho, depth);
}

HooResult hoo_run(Budget budget, const HooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim) {
  if (!(p.nu1 > 0.0)) {
    throw std::invalid_argument("hoo_run: nu1 must be positive");
  }
  if (!(p.rho > 0.0 && p.rho < 1.0)) {
    throw std::invalid_argument("hoo_run: rho must be in (0, 1)");
  }
  HooResult out;
  detail::HooEngine engine(dim, p.nu1, p.rho, p.seed, p.stream,
                           p.audit ? &out.audit : nullptr);
  out.records.reserve(budget.n_max);

  while (budget.n_used < budget.n_max) {
    engine.round([&](PartitionTree::NodeId leaf, std::mt19937_64& rng)
                     -> std::optional<std::pair<UnitPoint, double>> {
      UnitPoint u = cell_sample_uniform(engine.tree().node(leaf).cell, rng);
      const double kappa = f(u);
      ++budget.n_used;
      const auto& n = engine.tree().node(leaf);
      out.records.push_back({budget.n_used, u, kappa,
                             kappa >= critical_threshold,
                             NodeRef{n.depth, n.index}, std::nullopt});
      return std::make_pair(std::move(u), kappa);
    });
  }
  out.tree = engine.tree();
  return out;
}

}  // namespace critsearch
