#include "critsearch/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace critsearch {

namespace {

std::string fmt6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

}  // namespace

CriticalityObjective make_objective(const ExperimentConfig& cfg) {
  return CriticalityObjective(cfg.sim, cfg.limits, cfg.space, cfg.crit);
}

std::vector<EvalRecord> run_algorithm(const ExperimentConfig& cfg,
                                      const CriticalityObjective& obj,
                                      std::uint64_t seed) {
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };
  const double thr = cfg.crit.c_kappa;
  Budget budget{cfg.budget, 0};
  const std::size_t dim = cfg.space.size();

  if (cfg.algorithm == "mc") {
    return mc_run(budget, seed, f, thr, dim).records;
  }
  if (cfg.algorithm == "hoo") {
    HooParams p = cfg.hoo;
    p.seed = seed;
    return hoo_run(budget, p, f, thr, dim).records;
  }
  if (cfg.algorithm == "poo") {
    PooParams p = cfg.poo;
    p.seed = seed;
    return poo_run(budget, p, f, thr, dim).records;
  }
  if (cfg.algorithm == "doo") {
    return doo_run(budget, cfg.doo, f, thr, dim).records;
  }
  if (cfg.algorithm == "soo") {
    return soo_run(budget, cfg.soo, f, thr, dim).records;
  }
  throw std::invalid_argument("run_algorithm: unknown algorithm '" +
                              cfg.algorithm + "'");
}

std::vector<long> cumulative_curve(const std::vector<EvalRecord>& records) {
  std::vector<long> curve;
  curve.reserve(records.size());
  long acc = 0;
  for (const auto& r : records) {
    if (r.critical) ++acc;
    curve.push_back(acc);
  }
  return curve;
}

void write_run_csv(std::ostream& out, const std::vector<EvalRecord>& records,
                   const ParamSpace& space) {
  out << "idx,u0,u1,t_amb_c,i_max_a,kappa,critical,node_h,node_i,"
         "instance_id\n";
  for (const auto& r : records) {
    const ParamPoint p = denormalize(r.point, space);
    out << r.index << ',' << fmt6(r.point[0]) << ',' << fmt6(r.point[1]) << ','
        << fmt6(p.values[0]) << ',' << fmt6(p.values[1]) << ','
        << fmt6(r.kappa) << ',' << (r.critical ? 1 : 0) << ',';
    if (r.node) out << r.node->depth;
    out << ',';
    if (r.node) out << r.node->index;
    out << ',';
    if (r.instance_id) out << *r.instance_id;
    out << '\n';
  }
}

void write_curve_csv(std::ostream& out, const std::vector<long>& curve) {
  out << "n,critical_cum\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    out << (k + 1) << ',' << curve[k] << '\n';
  }
}

void write_grid_csv(std::ostream& out, const GridResult& grid,
                    const ParamSpace& space, double critical_threshold) {
  out << "u0,u1,t_amb_c,i_max_a,kappa,critical\n";
  const int res = grid.resolution;
  for (int i = 0; i < res; ++i) {
    for (int j = 0; j < res; ++j) {
      const double u0 = static_cast<double>(i) / (res - 1);
      const double u1 = static_cast<double>(j) / (res - 1);
      const ParamPoint p = denormalize({u0, u1}, space);
      const double kappa = grid.at(i, j);
      out << fmt6(u0) << ',' << fmt6(u1) << ',' << fmt6(p.values[0]) << ','
          << fmt6(p.values[1]) << ',' << fmt6(kappa) << ','
          << (kappa >= critical_threshold ? 1 : 0) << '\n';
    }
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "t_s,soc,t_bat_c,u_bat_v,control,i_charge_a\n";
  for (const auto& row : trace) {
    out << fmt6(row.t_s) << ',' << fmt6(row.soc) << ',' << fmt6(row.t_bat_c)
        << ',' << fmt6(row.u_bat_v) << ',' << to_string(row.control) << ','
        << fmt6(row.i_charge_a) << '\n';
  }
}

void write_summary_json(std::ostream& out, const ExperimentSummary& summary,
                        const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["algorithm"] = summary.algorithm;
  j["budget"] = summary.budget;
  nlohmann::json hp;
  if (cfg.algorithm == "hoo") {
    hp["nu1"] = cfg.hoo.nu1;
    hp["rho"] = cfg.hoo.rho;
  } else if (cfg.algorithm == "poo") {
    hp["nu_max"] = cfg.poo.nu_max;
    hp["rho_max"] = cfg.poo.rho_max;
  } else if (cfg.algorithm == "doo") {
    hp["nu1"] = cfg.doo.nu1;
    hp["rho"] = cfg.doo.rho;
  } else if (cfg.algorithm == "soo") {
    hp["epsilon"] = cfg.soo.epsilon;
  }
  j["hyperparameters"] = hp;
  j["per_seed"] = nlohmann::json::array();
  for (const auto& s : summary.per_seed) {
    j["per_seed"].push_back({{"seed", s.seed},
                             {"critical_count", s.critical_count},
                             {"kappa_max", s.kappa_max}});
  }
  j["critical_mean"] = summary.critical_mean;
  j["critical_stddev"] = summary.critical_stddev;
  j["critical_ratio"] = summary.critical_ratio;
  j["wall_time_s"] = summary.wall_time_s;
  out << j.dump(2) << '\n';
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const CriticalityObjective obj = make_objective(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);

  ExperimentSummary summary;
  summary.algorithm = cfg.algorithm;
  summary.budget = cfg.budget;

  for (const std::uint64_t seed : cfg.seeds) {
    const auto records = run_algorithm(cfg, obj, seed);

    SeedSummary s;
    s.seed = seed;
    for (const auto& r : records) {
      if (r.critical) ++s.critical_count;
      if (r.kappa > s.kappa_max) s.kappa_max = r.kappa;
    }
    summary.per_seed.push_back(s);

    auto run_csv = open_for_write(dir / ("run_" + std::to_string(seed) +
                                         ".csv"));
    write_run_csv(run_csv, records, cfg.space);
    auto curve_csv = open_for_write(dir / ("curve_" + std::to_string(seed) +
                                           ".csv"));
    write_curve_csv(curve_csv, cumulative_curve(records));
  }

  double sum = 0.0;
  for (const auto& s : summary.per_seed) sum += s.critical_count;
  const double n = static_cast<double>(summary.per_seed.size());
  summary.critical_mean = sum / n;
  if (summary.per_seed.size() > 1) {
    double ss = 0.0;
    for (const auto& s : summary.per_seed) {
      const double d = s.critical_count - summary.critical_mean;
      ss += d * d;
    }
    summary.critical_stddev = std::sqrt(ss / (n - 1.0));
  }
  summary.critical_ratio = summary.critical_mean / cfg.budget;
  summary.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  auto json_out = open_for_write(dir / "summary.json");
  write_summary_json(json_out, summary, cfg);
  return summary;
}

GridResult grid_oracle(int resolution, const ExperimentConfig& cfg) {
  if (resolution < 2) {
    throw std::invalid_argument("grid_oracle: resolution must be >= 2");
  }
  const CriticalityObjective obj = make_objective(cfg);
  GridResult grid;
  grid.resolution = resolution;
  grid.kappa.assign(static_cast<std::size_t>(resolution) * resolution, 0.0);

  unsigned n_threads = cfg.threads > 0
                           ? static_cast<unsigned>(cfg.threads)
                           : std::thread::hardware_concurrency();
  if (n_threads == 0) n_threads = 1;
  const long total = static_cast<long>(resolution) * resolution;

  auto worker = [&](long begin, long end) {
    for (long idx = begin; idx < end; ++idx) {
      const int i = static_cast<int>(idx / resolution);
      const int j = static_cast<int>(idx % resolution);
      const double u0 = static_cast<double>(i) / (resolution - 1);
      const double u1 = static_cast<double>(j) / (resolution - 1);
      grid.kappa[idx] = obj.evaluate({u0, u1});
    }
  };

  if (n_threads == 1) {
    worker(0, total);
  } else {
    std::vector<std::thread> pool;
    const long chunk = (total + n_threads - 1) / n_threads;
    for (unsigned t = 0; t < n_threads; ++t) {
      const long begin = t * chunk;
      const long end = std::min(total, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  long critical = 0;
  for (double k : grid.kappa) {
    if (k >= cfg.crit.c_kappa) ++critical;
  }
  grid.critical_fraction = static_cast<double>(critical) / total;
  return grid;
}

CalibrationReport calibrate_check(const ExperimentConfig& cfg) {
  constexpr int kResolution = 101;
  CalibrationReport rep;
  rep.grid = grid_oracle(kResolution, cfg);
  rep.critical_fraction = rep.grid.critical_fraction;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.min_critical_t_amb_c = nan;
  rep.min_critical_i_max_a = nan;

  double plateau_sum = 0.0;
  long plateau_n = 0;
  bool region_ok = true;
  for (int i = 0; i < kResolution; ++i) {
    for (int j = 0; j < kResolution; ++j) {
      const double u0 = static_cast<double>(i) / (kResolution - 1);
      const double u1 = static_cast<double>(j) / (kResolution - 1);
      const double kappa = rep.grid.at(i, j);
      if (u0 <= 0.25 && u1 <= 0.25) {
        plateau_sum += kappa;
        ++plateau_n;
      }
      if (kappa >= cfg.crit.c_kappa) {
        const ParamPoint p = denormalize({u0, u1}, cfg.space);
        const double t_amb = p.values[0];
        const double i_max = p.values[1];
        if (std::isnan(rep.min_critical_t_amb_c) ||
            t_amb < rep.min_critical_t_amb_c) {
          rep.min_critical_t_amb_c = t_amb;
        }
        if (std::isnan(rep.min_critical_i_max_a) ||
            i_max < rep.min_critical_i_max_a) {
          rep.min_critical_i_max_a = i_max;
        }
        if (t_amb < 25.0 || i_max < 55.0) region_ok = false;
      }
    }
  }
  rep.plateau_kappa = plateau_sum / plateau_n;
  rep.fraction_ok =
      rep.critical_fraction >= 0.003 && rep.critical_fraction <= 0.02;
  rep.region_ok = region_ok;
  rep.plateau_ok = rep.plateau_kappa >= 0.30 && rep.plateau_kappa <= 0.45;
  return rep;
}

std::vector<double> compare_hoo_rhos() {
  return {0.1, 0.3, 0.5, 0.7, 0.9, 0.99};
}

CompareReport compare_algorithms(const ExperimentConfig& cfg,
                                 const std::vector<std::string>& algorithms) {
  cfg.validate();
  const CriticalityObjective obj = make_objective(cfg);
  const double thr = cfg.crit.c_kappa;
  const SearchObjective f = [&obj](const UnitPoint& u) {
    return obj.evaluate(u);
  };
  const std::size_t dim = cfg.space.size();
  auto wants = [&algorithms](const char* name) {
    for (const auto& a : algorithms) {
      if (a == name) return true;
    }
    return false;
  };
  auto count_critical = [](const std::vector<EvalRecord>& records) {
    long c = 0;
    for (const auto& r : records) {
      if (r.critical) ++c;
    }
    return static_cast<double>(c);
  };

  CompareReport rep;
  bool have_mc = false, have_hoo = false, have_doo = false, have_soo = false;

  if (wants("mc")) {
    double sum = 0.0;
    for (const std::uint64_t seed : cfg.seeds) {
      sum += count_critical(
          mc_run(Budget{cfg.budget, 0}, seed, f, thr, dim).records);
    }
    rep.mc_mean = sum / static_cast<double>(cfg.seeds.size());
    rep.entries.push_back({"mc mean over " +
                               std::to_string(cfg.seeds.size()) + " seeds",
                           rep.mc_mean, false});
    have_mc = true;
  }
  if (wants("hoo")) {
    rep.best_hoo = -1.0;
    for (const double rho : compare_hoo_rhos()) {
      HooParams p = cfg.hoo;
      p.rho = rho;
      p.seed = cfg.seeds.front();
      const double c =
          count_critical(hoo_run(Budget{cfg.budget, 0}, p, f, thr, dim).records);
      char label[48];
      std::snprintf(label, sizeof(label), "hoo rho=%g", rho);
      rep.entries.push_back({label, c, true});
      if (c > rep.best_hoo) rep.best_hoo = c;
    }
    have_hoo = true;
  }
  if (wants("poo")) {
    PooParams p = cfg.poo;
    p.seed = cfg.seeds.front();
    const double c =
        count_critical(poo_run(Budget{cfg.budget, 0}, p, f, thr, dim).records);
    char label[48];
    std::snprintf(label, sizeof(label), "poo rho_max=%g", p.rho_max);
    rep.entries.push_back({label, c, true});
  }
  if (wants("doo")) {
    rep.doo_count =
        count_critical(doo_run(Budget{cfg.budget, 0}, cfg.doo, f, thr, dim)
                           .records);
    char label[48];
    std::snprintf(label, sizeof(label), "doo rho=%g", cfg.doo.rho);
    rep.entries.push_back({label, rep.doo_count, true});
    have_doo = true;
  }
  if (wants("soo")) {
    rep.soo_count =
        count_critical(soo_run(Budget{cfg.budget, 0}, cfg.soo, f, thr, dim)
                           .records);
    char label[48];
    std::snprintf(label, sizeof(label), "soo epsilon=%g", cfg.soo.epsilon);
    rep.entries.push_back({label, rep.soo_count, true});
    have_soo = true;
  }

  rep.asserted = cfg.budget >= kCompareAssertBudget && have_mc && have_hoo &&
                 have_doo && have_soo;
  if (rep.asserted) {
    rep.chain_ok = rep.doo_count > rep.soo_count &&
                   rep.soo_count > rep.best_hoo && rep.best_hoo > rep.mc_mean;
    rep.tenfold_ok = true;
    for (const auto& e : rep.entries) {
      if (e.optimistic && !(e.critical > 10.0 * rep.mc_mean)) {
        rep.tenfold_ok = false;
      }
    }
  }
  return rep;
}

}  // namespace critsearch
