// Command-line front end: run experiments, dump oracle grids, check the
// calibration gates, compare the search algorithms and export single
// simulation traces. Exit codes: 0 success, 1 configuration or usage
// error, 2 failed calibration/ordering assertion, 3 runtime failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "critsearch/config.hpp"
#include "critsearch/experiment.hpp"

namespace {

using critsearch::ExperimentConfig;

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;  // raw key=value overrides
  std::vector<std::uint64_t> seeds;
  int budget = -1;
  std::string out_dir;
  bool print_config = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path,
                  "Config file (flat section.key = value lines)");
  cmd->add_option("--set", flags.sets,
                  "Override one config key, e.g. --set sim.mass_kg=25")
      ->type_name("KEY=VALUE");
  cmd->add_option("--seed", flags.seeds, "Seed list (replaces run.seeds)");
  cmd->add_option("--budget", flags.budget, "Evaluation budget");
  cmd->add_option("--out", flags.out_dir, "Output directory");
  cmd->add_flag("--print-config", flags.print_config,
                "Print the effective configuration and exit");
}

// File first, then --set pairs in order, then the sugar flags.
ExperimentConfig build_config(const CommonFlags& flags) {
  ExperimentConfig cfg;
  if (!flags.config_path.empty()) {
    cfg = critsearch::load_config(flags.config_path);
  }
  for (const std::string& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects KEY=VALUE, got '" + kv + "'");
    }
    critsearch::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!flags.seeds.empty()) cfg.seeds = flags.seeds;
  if (flags.budget >= 0) cfg.budget = flags.budget;
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  return cfg;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  return out;
}

int cmd_run(const ExperimentConfig& cfg) {
  const auto summary = critsearch::run_experiment(cfg);
  std::printf("algorithm        %s\n", summary.algorithm.c_str());
  std::printf("budget           %d\n", summary.budget);
  for (const auto& s : summary.per_seed) {
    std::printf("seed %-11llu critical %ld (kappa_max %.6f)\n",
                static_cast<unsigned long long>(s.seed), s.critical_count,
                s.kappa_max);
  }
  std::printf("critical mean    %.2f\n", summary.critical_mean);
  std::printf("critical stddev  %.2f\n", summary.critical_stddev);
  std::printf("critical ratio   %.6f\n", summary.critical_ratio);
  std::printf("wall time        %.2f s\n", summary.wall_time_s);
  std::printf("outputs in       %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_grid(const ExperimentConfig& cfg, int resolution) {
  const int res = resolution > 0 ? resolution : cfg.grid_resolution;
  const auto grid = critsearch::grid_oracle(res, cfg);
  std::filesystem::create_directories(cfg.output_dir);
  auto out = open_out(std::filesystem::path(cfg.output_dir) / "grid.csv");
  critsearch::write_grid_csv(out, grid, cfg.space, cfg.crit.c_kappa);
  std::printf("resolution       %d\n", grid.resolution);
  std::printf("critical fraction %.6f\n", grid.critical_fraction);
  std::printf("grid written to  %s/grid.csv\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_calibrate(const ExperimentConfig& cfg) {
  const auto rep = critsearch::calibrate_check(cfg);
  std::filesystem::create_directories(cfg.output_dir);
  auto out = open_out(std::filesystem::path(cfg.output_dir) / "grid.csv");
  critsearch::write_grid_csv(out, rep.grid, cfg.space, cfg.crit.c_kappa);

  std::printf("gate fraction   [%s] critical fraction %.6f (need 0.003..0.02)\n",
              rep.fraction_ok ? "ok" : "FAIL", rep.critical_fraction);
  if (std::isnan(rep.min_critical_t_amb_c)) {
    std::printf("gate region     [%s] no critical cells\n",
                rep.region_ok ? "ok" : "FAIL");
  } else {
    std::printf(
        "gate region     [%s] critical cells at t_amb >= %.2f degC, "
        "i_max >= %.2f A (need >= 25 and >= 55)\n",
        rep.region_ok ? "ok" : "FAIL", rep.min_critical_t_amb_c,
        rep.min_critical_i_max_a);
  }
  std::printf("gate plateau    [%s] lower-left mean kappa %.6f (need 0.30..0.45)\n",
              rep.plateau_ok ? "ok" : "FAIL", rep.plateau_kappa);
  std::printf("calibration     %s\n", rep.passed() ? "PASS" : "FAIL");
  return rep.passed() ? 0 : 2;
}

int cmd_compare(const ExperimentConfig& cfg,
                const std::vector<std::string>& algos) {
  const auto rep = critsearch::compare_algorithms(cfg, algos);
  std::filesystem::create_directories(cfg.output_dir);
  auto out = open_out(std::filesystem::path(cfg.output_dir) / "compare.csv");
  out << "label,critical\n";
  for (const auto& e : rep.entries) {
    out << e.label << ',' << e.critical << '\n';
    std::printf("%-28s %10.1f\n", e.label.c_str(), e.critical);
  }
  if (!rep.asserted) {
    std::printf("orderings not asserted (needs mc+hoo+doo+soo and budget >= %d)\n",
                critsearch::kCompareAssertBudget);
    return 0;
  }
  std::printf("chain doo > soo > best hoo > mc mean: %s\n",
              rep.chain_ok ? "ok" : "FAIL");
  std::printf("every optimistic search > 10 x mc mean: %s\n",
              rep.tenfold_ok ? "ok" : "FAIL");
  return rep.passed() ? 0 : 2;
}

int cmd_trace(const ExperimentConfig& cfg, double t_amb_c, double i_max_a,
              int stride) {
  const auto obj = critsearch::make_objective(cfg);
  critsearch::UnitPoint u(cfg.space.size());
  const auto& dims = cfg.space.dims;
  u[0] = (t_amb_c - dims[0].lo) / (dims[0].hi - dims[0].lo);
  u[1] = (i_max_a - dims[1].lo) / (dims[1].hi - dims[1].lo);
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(u[k] >= 0.0 && u[k] <= 1.0)) {
      throw std::invalid_argument(
          "trace: point outside the configured parameter space (" +
          dims[k].name + ")");
    }
  }
  const auto outcome = obj.evaluate_outcome(u, stride > 0 ? stride : 1);
  std::filesystem::create_directories(cfg.output_dir);
  auto out = open_out(std::filesystem::path(cfg.output_dir) / "trace.csv");
  critsearch::write_trace_csv(out, outcome.trace);

  std::printf("t_amb            %.3f degC\n", t_amb_c);
  std::printf("i_max            %.3f A\n", i_max_a);
  std::printf("charging time    %.4f h%s\n", outcome.charging_time_h,
              outcome.timed_out ? " (timed out)" : "");
  std::printf("peak temperature %.3f degC\n", outcome.t_bat_peak_c);
  std::printf("kappa            %.6f\n", outcome.kappa_peak);
  std::printf("steps            %ld\n", outcome.steps);
  std::printf("trace written to %s/trace.csv\n", cfg.output_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Criticality-guided test generation for a battery fast-charging system"};
  app.require_subcommand(1);

  CommonFlags run_flags, grid_flags, cal_flags, cmp_flags, trace_flags;
  std::string run_algo;
  int grid_resolution = 0;
  std::vector<std::string> cmp_algos = {"mc", "hoo", "poo", "doo", "soo"};
  double trace_t_amb = 20.0, trace_i_max = 50.0;
  int trace_stride = 1;

  auto* run = app.add_subcommand("run", "Run one search experiment");
  add_common(run, run_flags);
  run->add_option("--algo", run_algo, "Algorithm: mc, hoo, poo, doo or soo");

  auto* grid = app.add_subcommand("grid", "Brute-force objective grid");
  add_common(grid, grid_flags);
  grid->add_option("--resolution", grid_resolution, "Grid points per axis");

  auto* cal = app.add_subcommand("calibrate", "Check the calibration gates");
  add_common(cal, cal_flags);

  auto* cmp = app.add_subcommand("compare", "Run the algorithm ordering suite");
  add_common(cmp, cmp_flags);
  cmp->add_option("--algos", cmp_algos, "Subset of mc,hoo,poo,doo,soo");

  auto* trc = app.add_subcommand("trace", "Export one simulation state trace");
  add_common(trc, trace_flags);
  trc->add_option("--t-amb", trace_t_amb, "Ambient temperature, degC")
      ->required();
  trc->add_option("--i-max", trace_i_max, "Station current limit, A")
      ->required();
  trc->add_option("--stride", trace_stride, "Trace row stride in steps");

  CLI11_PARSE(app, argc, argv);

  const CommonFlags* flags = nullptr;
  if (run->parsed()) flags = &run_flags;
  if (grid->parsed()) flags = &grid_flags;
  if (cal->parsed()) flags = &cal_flags;
  if (cmp->parsed()) flags = &cmp_flags;
  if (trc->parsed()) flags = &trace_flags;

  ExperimentConfig cfg;
  try {
    cfg = build_config(*flags);
    if (run->parsed() && !run_algo.empty()) cfg.algorithm = run_algo;
    cfg.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  }
  if (flags->print_config) {
    critsearch::save_config(cfg, std::cout);
    return 0;
  }

  try {
    if (run->parsed()) return cmd_run(cfg);
    if (grid->parsed()) return cmd_grid(cfg, grid_resolution);
    if (cal->parsed()) return cmd_calibrate(cfg);
    if (cmp->parsed()) return cmd_compare(cfg, cmp_algos);
    if (trc->parsed()) return cmd_trace(cfg, trace_t_amb, trace_i_max,
                                        trace_stride);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
