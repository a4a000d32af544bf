// Acceptance gate for the whole pipeline. Each numbered criterion
// prints exactly one [PASS]/[FAIL] line with the measured values; the
// exit code is the number of failed criteria. Thresholds are pinned
// here on purpose: loosening them is a deliberate edit, not a config
// change.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "critsearch/config.hpp"
#include "critsearch/criticality.hpp"
#include "critsearch/experiment.hpp"
#include "critsearch/partition_tree.hpp"
#include "critsearch/search.hpp"

using namespace critsearch;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool ok,
            const std::string& detail) {
  std::printf("[%s] %2d. %s (%s)\n", ok ? "PASS" : "FAIL", id, name.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------- 1 --

void criterion_1_formulas() {
  const CriticalitySpec spec;
  const double tol = 1e-12;
  double worst = 0.0;
  const std::vector<std::pair<double, double>> time_cases = {{7.2, 0.8},
                                                             {9.0, 1.0}};
  for (const auto& [h, expect] : time_cases) {
    worst = std::max(worst, std::abs(kappa_time(h, spec) - expect));
  }
  const std::vector<std::pair<double, double>> temp_cases = {
      {63.75, 1.0}, {-5.0, 0.0}, {50.0, 0.8}};
  for (const auto& [t, expect] : temp_cases) {
    worst = std::max(worst, std::abs(kappa_temp(t, spec) - expect));
  }
  report(1, "criticality anchor values exact",
         worst <= tol, fmt("max |error| %.3e, tol 1e-12", worst));
}

// ---------------------------------------------------------------- 2 --

double max_side(const Cell& c) {
  double m = 0.0;
  for (std::size_t a = 0; a < c.lo.size(); ++a) {
    m = std::max(m, c.hi[a] - c.lo[a]);
  }
  return m;
}

void criterion_2_partition() {
  std::mt19937_64 rng(20260814);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  long bad_tiling = 0, bad_index = 0, bad_diameter = 0;
  long probes_total = 0;

  for (int rep = 0; rep < 1000; ++rep) {
    PartitionTree tree(2);
    const int n_splits = 1 + static_cast<int>(rng() % 200);
    for (int s = 0; s < n_splits; ++s) {
      const auto leaves = tree.leaves();
      tree.split(leaves[rng() % leaves.size()]);
    }

    // Index arithmetic and monotone cell diameter, every node.
    for (std::size_t id = 0; id < tree.size(); ++id) {
      const auto& n = tree.node(static_cast<PartitionTree::NodeId>(id));
      if (!n.is_leaf()) {
        const auto& lo = tree.node(n.child_lo);
        const auto& hi = tree.node(n.child_hi);
        if (lo.depth != n.depth + 1 || hi.depth != n.depth + 1 ||
            lo.index != 2 * n.index - 1 || hi.index != 2 * n.index ||
            (lo.index + 1) / 2 != n.index || (hi.index + 1) / 2 != n.index) {
          ++bad_index;
        }
      }
      if (id > 0 && max_side(n.cell) > max_side(tree.node(n.parent).cell)) {
        ++bad_diameter;
      }
    }

    // Tiling: flatten the leaves once, then hammer with probes. Every
    // probe must fall into exactly one leaf cell, the one locate names.
    const auto leaves = tree.leaves();
    struct FlatCell {
      double lo0, lo1, hi0, hi1;
      PartitionTree::NodeId id;
    };
    std::vector<FlatCell> flat;
    flat.reserve(leaves.size());
    for (const auto id : leaves) {
      const Cell& c = tree.node(id).cell;
      flat.push_back({c.lo[0], c.lo[1], c.hi[0], c.hi[1], id});
    }

    for (int probe = 0; probe < 10000; ++probe) {
      double u0 = unit(rng), u1 = unit(rng);
      // Mix in exact dyadic coordinates: they sit on split boundaries.
      if (probe % 9 == 0) u0 = static_cast<double>(rng() % 9) / 8.0;
      if (probe % 13 == 0) u1 = static_cast<double>(rng() % 9) / 8.0;
      ++probes_total;

      int hits = 0;
      PartitionTree::NodeId found = -1;
      for (const FlatCell& c : flat) {
        const bool in0 = (u0 >= c.lo0 && u0 < c.hi0) || (u0 == c.hi0 && c.hi0 == 1.0);
        const bool in1 = (u1 >= c.lo1 && u1 < c.hi1) || (u1 == c.hi1 && c.hi1 == 1.0);
        if (in0 && in1) {
          ++hits;
          found = c.id;
        }
      }
      if (hits != 1 || tree.locate({u0, u1}) != found) ++bad_tiling;
    }
  }

  report(2, "partition tiling, indexing, diameter",
         bad_tiling == 0 && bad_index == 0 && bad_diameter == 0,
         fmt("probes %ld, tiling misses %ld, index errors %ld, "
             "diameter errors %ld",
             probes_total, bad_tiling, bad_index, bad_diameter));
}

// ---------------------------------------------------------------- 3 --

bool same_outcome(const SimOutcome& a, const SimOutcome& b) {
  if (a.charging_time_h != b.charging_time_h || a.timed_out != b.timed_out ||
      a.t_bat_peak_c != b.t_bat_peak_c || a.kappa_peak != b.kappa_peak ||
      a.steps != b.steps || a.trace.size() != b.trace.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    if (a.trace[i].t_s != b.trace[i].t_s || a.trace[i].soc != b.trace[i].soc ||
        a.trace[i].t_bat_c != b.trace[i].t_bat_c ||
        a.trace[i].u_bat_v != b.trace[i].u_bat_v ||
        a.trace[i].control != b.trace[i].control ||
        a.trace[i].i_charge_a != b.trace[i].i_charge_a) {
      return false;
    }
  }
  return true;
}

void criterion_3_simulator() {
  const SimParams p;
  const ControlLimits lim;
  bool deterministic = true;
  bool monotone = true;
  bool cooling = true;
  bool euler = true;

  for (const auto& [t_amb, i_max] :
       std::vector<std::pair<double, double>>{{25.7, 63.2}, {40.0, 10.0},
                                              {-5.0, 100.0}, {38.0, 57.0}}) {
    const SimOutcome a = simulate(t_amb, i_max, p, lim, {}, 1);
    const SimOutcome b = simulate(t_amb, i_max, p, lim, {}, 1);
    deterministic = deterministic && same_outcome(a, b);
    for (std::size_t i = 1; i < a.trace.size(); ++i) {
      if (a.trace[i].soc < a.trace[i - 1].soc) monotone = false;
    }
  }

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> temp(-20.0, 80.0);
  for (int k = 0; k < 100; ++k) {
    const double t_bat = temp(rng), t_amb = temp(rng);
    const double next = temp_step(t_bat, 0.0, t_amb, 0.5, p, p.dt_s);
    if (t_bat > t_amb && !(next < t_bat && next >= t_amb)) cooling = false;
    if (t_bat < t_amb && !(next > t_bat && next <= t_amb)) cooling = false;
    if (t_bat == t_amb && next != t_bat) cooling = false;
  }

  const double tau = p.heat_capacity_j_per_k() / p.heat_transfer_w_per_k();
  euler = p.dt_s < tau;
  try {
    p.validate();
  } catch (const std::exception&) {
    euler = false;
  }
  try {
    SimParams bad = p;
    bad.dt_s = tau + 1.0;
    bad.t_sim_max_s = bad.dt_s * 10;  // keep the horizon consistent
    bad.validate();
    euler = false;  // the unstable step must be rejected
  } catch (const std::exception&) {
  }

  report(3, "simulator determinism and physics",
         deterministic && monotone && cooling && euler,
         fmt("deterministic %d, soc monotone %d, cooling monotone %d, "
             "euler bound dt=%g < %g enforced %d",
             deterministic, monotone, cooling, p.dt_s, tau, euler));
}

// ---------------------------------------------------------------- 4 --

CalibrationReport criterion_4_calibration(const ExperimentConfig& cfg) {
  const CalibrationReport rep = calibrate_check(cfg);
  report(4, "calibration gates at resolution 101", rep.passed(),
         fmt("fraction %.6f in [0.003,0.02] %d; min critical %.2f C / "
             "%.2f A upper-right %d; plateau %.6f in [0.30,0.45] %d",
             rep.critical_fraction, rep.fraction_ok, rep.min_critical_t_amb_c,
             rep.min_critical_i_max_a, rep.region_ok, rep.plateau_kappa,
             rep.plateau_ok));
  return rep;
}

// ---------------------------------------------------------------- 5 --

double criterion_5_monte_carlo(const ExperimentConfig& cfg,
                               const CriticalityObjective& obj,
                               double grid_fraction) {
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };
  std::vector<long> counts;
  for (int seed = 1; seed <= 5; ++seed) {
    const McResult r = mc_run(Budget{4000, 0}, static_cast<std::uint64_t>(seed),
                              f, cfg.crit.c_kappa);
    long c = 0;
    for (const EvalRecord& rec : r.records) c += rec.critical;
    counts.push_back(c);
  }
  double mean = 0.0;
  for (long c : counts) mean += static_cast<double>(c);
  mean /= static_cast<double>(counts.size());

  const double expect = grid_fraction * 4000.0;
  const double sd = std::sqrt(4000.0 * grid_fraction * (1.0 - grid_fraction));
  const bool ok = std::abs(mean - expect) <= 3.0 * sd;
  report(5, "monte carlo mean vs grid oracle", ok,
         fmt("mean %.2f over 5 seeds, oracle %.2f, |diff| %.2f <= 3sd %.2f",
             mean, expect, std::abs(mean - expect), 3.0 * sd));
  return mean;
}

// ---------------------------------------------------------------- 6 --

long count_critical(const std::vector<EvalRecord>& records) {
  long c = 0;
  for (const EvalRecord& r : records) c += r.critical;
  return c;
}

bool hoo_invariants(const HooResult& r) {
  for (const HooAuditRound& round : r.audit) {
    if (round.path.empty() || round.path.front() != r.tree.root()) {
      return false;
    }
    if (round.chosen_b.size() != round.path.size() - 1) return false;
    for (std::size_t k = 0; k < round.chosen_b.size(); ++k) {
      if (round.chosen_b[k] < round.sibling_b[k]) return false;
    }
    for (std::size_t k = 1; k < round.path.size(); ++k) {
      if (r.tree.node(round.path[k]).parent != round.path[k - 1]) return false;
    }
  }
  for (std::size_t id = 0; id < r.tree.size(); ++id) {
    const auto& n = r.tree.node(static_cast<PartitionTree::NodeId>(id));
    if (n.b_value > n.u_value) return false;
    if (!n.is_leaf() &&
        n.visits != r.tree.node(n.child_lo).visits +
                        r.tree.node(n.child_hi).visits + n.plays_as_leaf) {
      return false;
    }
  }
  return true;
}

double criterion_6_hoo(const ExperimentConfig& cfg,
                       const CriticalityObjective& obj, double mc_mean) {
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };
  bool counts_ok = true, invariants_ok = true;
  double best = 0.0;
  std::string detail;
  for (const double rho : {0.1, 0.3, 0.99}) {
    HooParams p{1.0, rho, 1};
    p.audit = true;
    const HooResult r = hoo_run(Budget{4000, 0}, p, f, cfg.crit.c_kappa);
    const long c = count_critical(r.records);
    best = std::max(best, static_cast<double>(c));
    if (static_cast<double>(c) < 10.0 * mc_mean) counts_ok = false;
    if (!hoo_invariants(r)) invariants_ok = false;
    detail += fmt("rho %.2f: %ld; ", rho, c);
  }
  report(6, "hoo tenfold over monte carlo + invariants",
         counts_ok && invariants_ok,
         detail + fmt("floor %.1f, invariants %d", 10.0 * mc_mean,
                      invariants_ok));
  return best;
}

// ---------------------------------------------------------------- 7 --

double criterion_7_doo(const ExperimentConfig& cfg,
                       const CriticalityObjective& obj) {
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };
  bool counts_ok = true, stable_ok = true;
  double worst = std::numeric_limits<double>::infinity();
  std::string detail;
  for (const double rho : {0.1, 0.3, 0.99}) {
    const DooParams p{1.0, rho};
    const DooResult a = doo_run(Budget{4000, 0}, p, f, cfg.crit.c_kappa);
    const DooResult b = doo_run(Budget{4000, 0}, p, f, cfg.crit.c_kappa);
    const long c = count_critical(a.records);
    worst = std::min(worst, static_cast<double>(c));
    if (static_cast<double>(c) <
        0.9 * static_cast<double>(a.records.size())) {
      counts_ok = false;
    }
    if (a.records.size() != b.records.size()) stable_ok = false;
    for (std::size_t i = 0; stable_ok && i < a.records.size(); ++i) {
      if (a.records[i].point != b.records[i].point ||
          a.records[i].kappa != b.records[i].kappa) {
        stable_ok = false;
      }
    }
    detail += fmt("rho %.2f: %ld; ", rho, c);
  }
  report(7, "doo >=90% critical + rerun identical", counts_ok && stable_ok,
         detail + fmt("reruns identical %d", stable_ok));
  return worst;
}

// ---------------------------------------------------------------- 8 --

void criterion_8_soo(const ExperimentConfig& cfg,
                     const CriticalityObjective& obj, double best_hoo,
                     double worst_doo) {
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };
  std::vector<long> counts;
  for (const double eps : {0.6, 0.7, 0.8, 0.9}) {
    const SooResult r = soo_run(Budget{4000, 0}, SooParams{eps}, f,
                                cfg.crit.c_kappa);
    counts.push_back(count_critical(r.records));
  }
  const bool plateau = counts[1] == counts[2] && counts[2] == counts[3];
  const double ref = static_cast<double>(counts[1]);
  const bool near = std::abs(static_cast<double>(counts[0]) - ref) <=
                    0.02 * ref;
  const bool between = best_hoo < ref && ref < worst_doo;
  report(8, "soo epsilon plateau and ordering slot",
         plateau && near && between,
         fmt("counts 0.6/0.7/0.8/0.9 = %ld/%ld/%ld/%ld; plateau %d; "
             "0.6 within 2%% %d; hoo %.0f < %.0f < doo %.0f: %d",
             counts[0], counts[1], counts[2], counts[3], plateau, near,
             best_hoo, ref, worst_doo, between));
}

// ---------------------------------------------------------------- 9 --

void criterion_9_poo(const ExperimentConfig& cfg,
                     const CriticalityObjective& obj) {
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };

  const std::vector<std::pair<double, std::size_t>> want = {
      {0.1, 1}, {0.2, 2}, {0.3, 2}, {0.4, 4}, {0.5, 4},
      {0.6, 8}, {0.7, 8}, {0.8, 16}, {0.9, 32}};
  bool schedule_ok = true;
  for (const auto& [rho_max, m] : want) {
    if (poo_schedule(rho_max, 4000).size() != m) schedule_ok = false;
  }

  // Shared-cache economy on a real run: every fresh evaluation sits on
  // a distinct tree node and the per-instance ledgers add up.
  const PooResult r =
      poo_run(Budget{4000, 0}, PooParams{1.0, 0.3, 1}, f, cfg.crit.c_kappa);
  bool cache_ok = r.records.size() == 4000;
  std::set<std::pair<int, std::uint64_t>> seen;
  for (const EvalRecord& rec : r.records) {
    if (!rec.node || !seen.emplace(rec.node->depth, rec.node->index).second) {
      cache_ok = false;
    }
  }
  long fresh = 0;
  for (const PooInstanceStats& s : r.instances) {
    if (s.requests != s.fresh_evals + s.cache_hits) cache_ok = false;
    fresh += s.fresh_evals;
  }
  if (fresh != static_cast<long>(r.records.size())) cache_ok = false;

  // Degenerate schedule: one instance must replay plain hoo exactly.
  const PooResult one =
      poo_run(Budget{2000, 0}, PooParams{1.0, 0.1, 3}, f, cfg.crit.c_kappa);
  const HooResult ref =
      hoo_run(Budget{2000, 0}, HooParams{1.0, 0.1, 3}, f, cfg.crit.c_kappa);
  bool degenerate_ok = one.instance_rhos.size() == 1 &&
                       one.records.size() == ref.records.size();
  for (std::size_t i = 0; degenerate_ok && i < one.records.size(); ++i) {
    if (one.records[i].point != ref.records[i].point ||
        one.records[i].kappa != ref.records[i].kappa) {
      degenerate_ok = false;
    }
  }

  report(9, "poo schedule, shared cache, degenerate run",
         schedule_ok && cache_ok && degenerate_ok,
         fmt("schedule %d; cache unique + ledgers %d (hits %ld); "
             "M=1 equals hoo %d",
             schedule_ok, cache_ok, r.cache_hits, degenerate_ok));
}

// --------------------------------------------------------------- 10 --

void criterion_10_hand_traces() {
  const SearchObjective f = [](const UnitPoint& u) { return u[0]; };

  const std::vector<UnitPoint> doo_expect = {
      {0.5, 0.5},   {0.25, 0.5},   {0.75, 0.5},  {0.75, 0.25},
      {0.75, 0.75}, {0.625, 0.25}, {0.875, 0.25}};
  const DooResult doo = doo_run(Budget{7, 0}, DooParams{1.0, 0.5}, f, 0.8);
  bool doo_ok = doo.records.size() == doo_expect.size();
  for (std::size_t i = 0; doo_ok && i < doo_expect.size(); ++i) {
    if (doo.records[i].point != doo_expect[i]) doo_ok = false;
  }

  const std::vector<UnitPoint> soo_expect = {
      {0.5, 0.5},   {0.25, 0.5},  {0.75, 0.5}, {0.75, 0.25},
      {0.75, 0.75}, {0.25, 0.25}, {0.25, 0.75}};
  const SooResult soo = soo_run(Budget{7, 0}, SooParams{0.6}, f, 0.8);
  bool soo_ok = soo.records.size() == soo_expect.size();
  for (std::size_t i = 0; soo_ok && i < soo_expect.size(); ++i) {
    if (soo.records[i].point != soo_expect[i]) soo_ok = false;
  }

  report(10, "budget-7 hand traces on kappa(u)=u0", doo_ok && soo_ok,
         fmt("doo %d, soo %d", doo_ok, soo_ok));
}

}  // namespace

int main() {
  const ExperimentConfig cfg;  // calibrated defaults under test
  const CriticalityObjective obj = make_objective(cfg);

  criterion_1_formulas();
  criterion_2_partition();
  criterion_3_simulator();
  const CalibrationReport cal = criterion_4_calibration(cfg);
  const double mc_mean =
      criterion_5_monte_carlo(cfg, obj, cal.critical_fraction);
  const double best_hoo = criterion_6_hoo(cfg, obj, mc_mean);
  const double worst_doo = criterion_7_doo(cfg, obj);
  criterion_8_soo(cfg, obj, best_hoo, worst_doo);
  criterion_9_poo(cfg, obj);
  criterion_10_hand_traces();

  if (g_failures == 0) {
    std::printf("acceptance: all 10 criteria passed\n");
  } else {
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
  }
  return g_failures;
}
