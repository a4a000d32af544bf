#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <unordered_map>

#include "critsearch/search.hpp"
#include "hoo_engine.hpp"

namespace critsearch {

namespace {

struct NodeKey {
  int depth;
  std::uint64_t index;
  bool operator==(const NodeKey&) const = default;
};

struct NodeKeyHash {
  std::size_t operator()(const NodeKey& k) const {
    return std::hash<std::uint64_t>{}(
        (static_cast<std::uint64_t>(k.depth) << 56) ^
        k.index * 0x9e3779b97f4a7c15ull);
  }
};

void observe(PooInstanceStats& s, double kappa, double threshold) {
  s.reward_sum += kappa;
  if (kappa >= threshold) ++s.critical;
}

}  // namespace

std::vector<double> poo_schedule(double rho_max, int n_max) {
  if (!(rho_max > 0.0 && rho_max < 1.0)) {
    throw std::invalid_argument("poo_schedule: rho_max must lie in (0, 1)");
  }
  if (n_max < 3) {
    throw std::invalid_argument("poo_schedule: budget too small");
  }
  const double d_max = std::log(2.0) / std::log(1.0 / rho_max);
  const double n = static_cast<double>(n_max);
  const double target = 0.5 * d_max * std::log(n / std::log(n));
  long needed = static_cast<long>(std::ceil(target));
  if (needed < 1) needed = 1;
  long m = 1;
  while (m < needed) m *= 2;

  std::vector<double> rhos;
  rhos.reserve(m);
  for (long j = 1; j <= m; ++j) {
    rhos.push_back(std::pow(rho_max, static_cast<double>(m) /
                                         static_cast<double>(j)));
  }
  return rhos;
}

PooResult poo_run(Budget budget, const PooParams& p, const SearchObjective& f,
                  double critical_threshold, std::size_t dim) {
  PooResult out;
  out.instance_rhos = poo_schedule(p.rho_max, budget.n_max);
  const int m = static_cast<int>(out.instance_rhos.size());

  std::vector<std::unique_ptr<detail::HooEngine>> engines;
  engines.reserve(m);
  out.instances.resize(m);
  for (int j = 1; j <= m; ++j) {
    engines.push_back(std::make_unique<detail::HooEngine>(
        dim, p.nu_max, out.instance_rhos[j - 1], p.seed, j));
    out.instances[j - 1].instance_id = j;
    out.instances[j - 1].rho = out.instance_rhos[j - 1];
  }

  std::unordered_map<NodeKey, std::pair<UnitPoint, double>, NodeKeyHash> cache;
  out.records.reserve(budget.n_max);

  // Each cached node yields at most one hit per instance (a leaf splits
  // right after its round), so zero-budget streaks cannot exceed this.
  const long stall_limit = static_cast<long>(m) * budget.n_max + 1000;
  long stalled_rounds = 0;
  while (budget.n_used < budget.n_max) {
    for (int j = 1; j <= m && budget.n_used < budget.n_max; ++j) {
      auto& stats = out.instances[j - 1];
      const int used_before = budget.n_used;
      engines[j - 1]->round(
          [&](PartitionTree::NodeId leaf, std::mt19937_64& rng)
              -> std::optional<std::pair<UnitPoint, double>> {
            const auto& node = engines[j - 1]->tree().node(leaf);
            const NodeKey key{node.depth, node.index};
            ++stats.requests;
            if (auto it = cache.find(key); it != cache.end()) {
              ++stats.cache_hits;
              ++out.cache_hits;
              observe(stats, it->second.second, critical_threshold);
              return it->second;
            }
            if (budget.n_used >= budget.n_max) return std::nullopt;
            UnitPoint u = cell_sample_uniform(node.cell, rng);
            const double kappa = f(u);
            ++budget.n_used;
            ++stats.fresh_evals;
            observe(stats, kappa, critical_threshold);
            out.records.push_back({budget.n_used, u, kappa,
                                   kappa >= critical_threshold,
                                   NodeRef{node.depth, node.index}, j});
            auto value = std::make_pair(std::move(u), kappa);
            cache.emplace(key, value);
            return value;
          });
      if (budget.n_used == used_before) {
        if (++stalled_rounds > stall_limit) {
          throw std::runtime_error("poo_run: rounds stopped consuming budget");
        }
      } else {
        stalled_rounds = 0;
      }
    }
  }

  out.best_instance = 1;
  double best_mean = -1.0;
  for (const auto& s : out.instances) {
    const double mean =
        s.requests > 0 ? s.reward_sum / static_cast<double>(s.requests) : 0.0;
    if (s.requests > 0 && mean > best_mean) {
      best_mean = mean;
      out.best_instance = s.instance_id;
    }
  }
  return out;
}

}  // namespace critsearch
