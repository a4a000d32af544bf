#include "critsearch/search.hpp"
#include "hoo_engine.hpp"

namespace critsearch {

McResult mc_run(Budget budget, std::uint64_t seed, const SearchObjective& f,
                double critical_threshold, std::size_t dim) {
  auto rng = detail::make_rng(seed, 0);
  Cell unit;
  unit.lo.assign(dim, 0.0);
  unit.hi.assign(dim, 1.0);

  McResult out;
  out.records.reserve(budget.n_max);
  while (budget.n_used < budget.n_max) {
    UnitPoint u = cell_sample_uniform(unit, rng);
    const double kappa = f(u);
    ++budget.n_used;
    out.records.push_back({budget.n_used, std::move(u), kappa,
                           kappa >= critical_threshold, std::nullopt,
                           std::nullopt});
  }
  return out;
}

}  // namespace critsearch
