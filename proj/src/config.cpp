#include "critsearch/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace critsearch {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(value, &pos);
    if (trim(value.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("key '" + key + "': cannot parse '" + value +
                           "' as a number");
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (trim(value.substr(pos)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw std::runtime_error("key '" + key + "': cannot parse '" + value +
                           "' as an integer");
}

bool same_rects(const RFactorTable& a, const RFactorTable& b) {
  if (a.rects().size() != b.rects().size()) return false;
  for (std::size_t i = 0; i < a.rects().size(); ++i) {
    const RFactorRect& x = a.rects()[i];
    const RFactorRect& y = b.rects()[i];
    if (x.soc_lo != y.soc_lo || x.soc_hi != y.soc_hi || x.i_lo != y.i_lo ||
        x.i_hi != y.i_hi || x.factor != y.factor) {
      return false;
    }
  }
  return true;
}

std::vector<double> parse_doubles(const std::string& key,
                                  const std::string& value) {
  std::vector<double> out;
  std::istringstream in(value);
  std::string tok;
  while (in >> tok) out.push_back(parse_double(key, tok));
  return out;
}

// Shortest decimal that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  if (std::stod(buf) != v) std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using DoubleRef = double& (*)(ExperimentConfig&);
struct DoubleKey {
  const char* key;
  DoubleRef ref;
};

const DoubleKey kDoubleKeys[] = {
    {"hoo.nu1", [](ExperimentConfig& c) -> double& { return c.hoo.nu1; }},
    {"hoo.rho", [](ExperimentConfig& c) -> double& { return c.hoo.rho; }},
    {"poo.nu_max", [](ExperimentConfig& c) -> double& { return c.poo.nu_max; }},
    {"poo.rho_max",
     [](ExperimentConfig& c) -> double& { return c.poo.rho_max; }},
    {"doo.nu1", [](ExperimentConfig& c) -> double& { return c.doo.nu1; }},
    {"doo.rho", [](ExperimentConfig& c) -> double& { return c.doo.rho; }},
    {"soo.epsilon",
     [](ExperimentConfig& c) -> double& { return c.soo.epsilon; }},

    {"sim.b_size_ah",
     [](ExperimentConfig& c) -> double& { return c.sim.b_size_ah; }},
    {"sim.mass_kg",
     [](ExperimentConfig& c) -> double& { return c.sim.mass_kg; }},
    {"sim.c_cell_j_per_kg_k",
     [](ExperimentConfig& c) -> double& { return c.sim.c_cell_j_per_kg_k; }},
    {"sim.r_internal_ohm",
     [](ExperimentConfig& c) -> double& { return c.sim.r_internal_ohm; }},
    {"sim.surface_area_m2",
     [](ExperimentConfig& c) -> double& { return c.sim.surface_area_m2; }},
    {"sim.h_transfer_w_per_m2_k",
     [](ExperimentConfig& c) -> double& {
       return c.sim.h_transfer_w_per_m2_k;
     }},
    {"sim.r_a_ohm", [](ExperimentConfig& c) -> double& { return c.sim.r_a_ohm; }},
    {"sim.ocv0_v", [](ExperimentConfig& c) -> double& { return c.sim.ocv0_v; }},
    {"sim.ocv_slope_v",
     [](ExperimentConfig& c) -> double& { return c.sim.ocv_slope_v; }},
    {"sim.soc_init",
     [](ExperimentConfig& c) -> double& { return c.sim.soc_init; }},
    {"sim.t_bat_init_c",
     [](ExperimentConfig& c) -> double& { return c.sim.t_bat_init_c; }},
    {"sim.dt_s", [](ExperimentConfig& c) -> double& { return c.sim.dt_s; }},
    {"sim.t_sim_max_s",
     [](ExperimentConfig& c) -> double& { return c.sim.t_sim_max_s; }},

    {"limits.soc_full",
     [](ExperimentConfig& c) -> double& { return c.limits.soc_full; }},
    {"limits.soc_rearm",
     [](ExperimentConfig& c) -> double& { return c.limits.soc_rearm; }},
    {"limits.t_bat_max_approve_c",
     [](ExperimentConfig& c) -> double& {
       return c.limits.t_bat_max_approve_c;
     }},
    {"limits.t_bat_rearm_c",
     [](ExperimentConfig& c) -> double& { return c.limits.t_bat_rearm_c; }},
    {"limits.t_bat_min_approve_c",
     [](ExperimentConfig& c) -> double& {
       return c.limits.t_bat_min_approve_c;
     }},
    {"limits.t_bat_min_rearm_c",
     [](ExperimentConfig& c) -> double& {
       return c.limits.t_bat_min_rearm_c;
     }},
    {"limits.u_bat_max_approve_v",
     [](ExperimentConfig& c) -> double& {
       return c.limits.u_bat_max_approve_v;
     }},
    {"limits.u_bat_rearm_v",
     [](ExperimentConfig& c) -> double& { return c.limits.u_bat_rearm_v; }},
    {"limits.heatup_temp_c",
     [](ExperimentConfig& c) -> double& { return c.limits.heatup_temp_c; }},
    {"limits.fast_soc_lo",
     [](ExperimentConfig& c) -> double& { return c.limits.fast_soc_lo; }},
    {"limits.fast_soc_hi",
     [](ExperimentConfig& c) -> double& { return c.limits.fast_soc_hi; }},
    {"limits.fast_temp_lo_c",
     [](ExperimentConfig& c) -> double& { return c.limits.fast_temp_lo_c; }},
    {"limits.fast_temp_hi_c",
     [](ExperimentConfig& c) -> double& { return c.limits.fast_temp_hi_c; }},
    {"limits.i_heatup_a",
     [](ExperimentConfig& c) -> double& { return c.limits.i_heatup_a; }},
    {"limits.i_slow_a",
     [](ExperimentConfig& c) -> double& { return c.limits.i_slow_a; }},
    {"limits.i_rest_a",
     [](ExperimentConfig& c) -> double& { return c.limits.i_rest_a; }},

    {"space.t_amb_lo_c",
     [](ExperimentConfig& c) -> double& { return c.space.dims[0].lo; }},
    {"space.t_amb_hi_c",
     [](ExperimentConfig& c) -> double& { return c.space.dims[0].hi; }},
    {"space.i_max_lo_a",
     [](ExperimentConfig& c) -> double& { return c.space.dims[1].lo; }},
    {"space.i_max_hi_a",
     [](ExperimentConfig& c) -> double& { return c.space.dims[1].hi; }},

    {"crit.c_kappa",
     [](ExperimentConfig& c) -> double& { return c.crit.c_kappa; }},
    {"crit.t_min_h",
     [](ExperimentConfig& c) -> double& { return c.crit.t_min_h; }},
    {"crit.t_fatal_h",
     [](ExperimentConfig& c) -> double& { return c.crit.t_fatal_h; }},
    {"crit.temp_min_c",
     [](ExperimentConfig& c) -> double& { return c.crit.temp_min_c; }},
    {"crit.temp_fatal_c",
     [](ExperimentConfig& c) -> double& { return c.crit.temp_fatal_c; }},
};

using IntRef = int& (*)(ExperimentConfig&);
struct IntKey {
  const char* key;
  IntRef ref;
};

const IntKey kIntKeys[] = {
    {"run.budget", [](ExperimentConfig& c) -> int& { return c.budget; }},
    {"run.trace_stride",
     [](ExperimentConfig& c) -> int& { return c.trace_stride; }},
    {"run.grid_resolution",
     [](ExperimentConfig& c) -> int& { return c.grid_resolution; }},
    {"run.threads", [](ExperimentConfig& c) -> int& { return c.threads; }},
};

using StringRef = std::string& (*)(ExperimentConfig&);
struct StringKey {
  const char* key;
  StringRef ref;
};

const StringKey kStringKeys[] = {
    {"run.algorithm",
     [](ExperimentConfig& c) -> std::string& { return c.algorithm; }},
    {"run.output_dir",
     [](ExperimentConfig& c) -> std::string& { return c.output_dir; }},
};

}  // namespace

void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  for (const auto& k : kDoubleKeys) {
    if (key == k.key) {
      k.ref(cfg) = parse_double(key, value);
      return;
    }
  }
  for (const auto& k : kIntKeys) {
    if (key == k.key) {
      k.ref(cfg) = parse_int(key, value);
      return;
    }
  }
  for (const auto& k : kStringKeys) {
    if (key == k.key) {
      k.ref(cfg) = value;
      return;
    }
  }
  if (key == "run.seeds") {
    std::vector<std::uint64_t> seeds;
    for (double d : parse_doubles(key, value)) {
      if (d < 0 || d != static_cast<std::uint64_t>(d)) {
        throw std::runtime_error("key 'run.seeds': '" + value +
                                 "' is not a list of non-negative integers");
      }
      seeds.push_back(static_cast<std::uint64_t>(d));
    }
    if (seeds.empty()) {
      throw std::runtime_error("key 'run.seeds': needs at least one seed");
    }
    cfg.seeds = std::move(seeds);
    return;
  }
  if (key == "sim.r_factor") {
    const auto v = parse_doubles(key, value);
    if (v.size() != 5) {
      throw std::runtime_error(
          "key 'sim.r_factor': expected 5 values "
          "(soc_lo soc_hi i_lo i_hi factor), got " +
          std::to_string(v.size()));
    }
    // The first configured rectangle replaces the built-in table
    // (otherwise no config could ever shrink it); later ones append.
    auto rects = same_rects(cfg.sim.r_factors, SimParams{}.r_factors)
                     ? std::vector<RFactorRect>{}
                     : cfg.sim.r_factors.rects();
    rects.push_back({v[0], v[1], v[2], v[3], v[4]});
    cfg.sim.r_factors = RFactorTable(rects);  // re-validates overlap
    return;
  }
  throw std::runtime_error("unknown config key '" + key + "'");
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) {
      throw std::runtime_error(where + ": expected 'section.key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key != "sim.r_factor" && !seen.insert(key).second) {
      throw std::runtime_error(where + ": duplicate key '" + key + "'");
    }
    try {
      apply_config_entry(cfg, key, value);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("config: " + what);
  };
  if (algorithm != "mc" && algorithm != "hoo" && algorithm != "poo" &&
      algorithm != "doo" && algorithm != "soo") {
    fail("run.algorithm must be one of mc, hoo, poo, doo, soo (got '" +
         algorithm + "')");
  }
  if (budget < 1) fail("run.budget must be >= 1");
  if (seeds.empty()) fail("run.seeds needs at least one seed");
  if (trace_stride < 0) fail("run.trace_stride must be >= 0");
  if (grid_resolution < 2) fail("run.grid_resolution must be >= 2");
  if (threads < 0) fail("run.threads must be >= 0");
  if (!(hoo.nu1 > 0)) fail("hoo.nu1 must be > 0");
  if (!(hoo.rho > 0 && hoo.rho < 1)) fail("hoo.rho must lie in (0, 1)");
  if (!(poo.nu_max > 0)) fail("poo.nu_max must be > 0");
  if (!(poo.rho_max > 0 && poo.rho_max < 1)) {
    fail("poo.rho_max must lie in (0, 1)");
  }
  if (!(doo.nu1 > 0)) fail("doo.nu1 must be > 0");
  if (!(doo.rho > 0 && doo.rho < 1)) fail("doo.rho must lie in (0, 1)");
  if (!(soo.epsilon > 0 && soo.epsilon <= 1))
    fail("soo.epsilon must be in (0, 1]");
  sim.validate();
  limits.validate();
  space.validate();
  crit.validate();
}

void save_config(const ExperimentConfig& cfg, std::ostream& out) {
  out << "# Experiment configuration. Flat key paths, one assignment per\n"
         "# line; '#' starts a comment. Units are embedded in key names.\n"
         "\n"
         "# What to run and where to put the results.\n";
  out << "run.algorithm = " << cfg.algorithm << "\n";
  out << "run.budget = " << cfg.budget << "\n";
  out << "run.seeds =";
  for (auto s : cfg.seeds) out << " " << s;
  out << "\n";
  out << "run.output_dir = " << cfg.output_dir << "\n";
  out << "run.trace_stride = " << cfg.trace_stride
      << "  # 0 disables state-trace export\n";
  out << "run.grid_resolution = " << cfg.grid_resolution << "\n";
  out << "run.threads = " << cfg.threads
      << "  # grid workers; 0 means one per hardware thread\n";

  out << "\n# Search hyperparameters (only the active algorithm's are "
         "used).\n";
  out << "hoo.nu1 = " << format_double(cfg.hoo.nu1) << "\n";
  out << "hoo.rho = " << format_double(cfg.hoo.rho) << "\n";
  out << "poo.nu_max = " << format_double(cfg.poo.nu_max) << "\n";
  out << "poo.rho_max = " << format_double(cfg.poo.rho_max) << "\n";
  out << "doo.nu1 = " << format_double(cfg.doo.nu1) << "\n";
  out << "doo.rho = " << format_double(cfg.doo.rho) << "\n";
  out << "soo.epsilon = " << format_double(cfg.soo.epsilon) << "\n";

  out << "\n# Battery and charging-station physics.\n";
  out << "sim.b_size_ah = " << format_double(cfg.sim.b_size_ah) << "\n";
  out << "sim.mass_kg = " << format_double(cfg.sim.mass_kg) << "\n";
  out << "sim.c_cell_j_per_kg_k = " << format_double(cfg.sim.c_cell_j_per_kg_k)
      << "\n";
  out << "sim.r_internal_ohm = " << format_double(cfg.sim.r_internal_ohm)
      << "\n";
  out << "sim.surface_area_m2 = " << format_double(cfg.sim.surface_area_m2)
      << "\n";
  out << "sim.h_transfer_w_per_m2_k = "
      << format_double(cfg.sim.h_transfer_w_per_m2_k) << "\n";
  out << "sim.r_a_ohm = " << format_double(cfg.sim.r_a_ohm) << "\n";
  out << "sim.ocv0_v = " << format_double(cfg.sim.ocv0_v) << "\n";
  out << "sim.ocv_slope_v = " << format_double(cfg.sim.ocv_slope_v) << "\n";
  out << "sim.soc_init = " << format_double(cfg.sim.soc_init) << "\n";
  out << "sim.t_bat_init_c = " << format_double(cfg.sim.t_bat_init_c) << "\n";
  out << "sim.dt_s = " << format_double(cfg.sim.dt_s) << "\n";
  out << "sim.t_sim_max_s = " << format_double(cfg.sim.t_sim_max_s) << "\n";
  out << "# Internal-resistance scaling: repeatable rectangles\n"
         "#   sim.r_factor = soc_lo soc_hi i_lo i_hi factor\n"
         "# (half-open in soc and current). The first line replaces the\n"
         "# built-in table, later lines add to it; uncovered points use\n"
         "# factor 1.\n";
  for (const auto& r : cfg.sim.r_factors.rects()) {
    out << "sim.r_factor = " << format_double(r.soc_lo) << " "
        << format_double(r.soc_hi) << " " << format_double(r.i_lo) << " "
        << format_double(r.i_hi) << " " << format_double(r.factor) << "\n";
  }

  out << "\n# Charging-approval hysteresis and management thresholds.\n";
  out << "limits.soc_full = " << format_double(cfg.limits.soc_full) << "\n";
  out << "limits.soc_rearm = " << format_double(cfg.limits.soc_rearm) << "\n";
  out << "limits.t_bat_max_approve_c = "
      << format_double(cfg.limits.t_bat_max_approve_c) << "\n";
  out << "limits.t_bat_rearm_c = " << format_double(cfg.limits.t_bat_rearm_c)
      << "\n";
  out << "limits.t_bat_min_approve_c = "
      << format_double(cfg.limits.t_bat_min_approve_c) << "\n";
  out << "limits.t_bat_min_rearm_c = "
      << format_double(cfg.limits.t_bat_min_rearm_c) << "\n";
  out << "limits.u_bat_max_approve_v = "
      << format_double(cfg.limits.u_bat_max_approve_v) << "\n";
  out << "limits.u_bat_rearm_v = " << format_double(cfg.limits.u_bat_rearm_v)
      << "\n";
  out << "limits.heatup_temp_c = " << format_double(cfg.limits.heatup_temp_c)
      << "\n";
  out << "limits.fast_soc_lo = " << format_double(cfg.limits.fast_soc_lo)
      << "\n";
  out << "limits.fast_soc_hi = " << format_double(cfg.limits.fast_soc_hi)
      << "\n";
  out << "limits.fast_temp_lo_c = " << format_double(cfg.limits.fast_temp_lo_c)
      << "\n";
  out << "limits.fast_temp_hi_c = " << format_double(cfg.limits.fast_temp_hi_c)
      << "\n";
  out << "limits.i_heatup_a = " << format_double(cfg.limits.i_heatup_a)
      << "\n";
  out << "limits.i_slow_a = " << format_double(cfg.limits.i_slow_a) << "\n";
  out << "limits.i_rest_a = " << format_double(cfg.limits.i_rest_a) << "\n";

  out << "\n# Search space (normalized to the unit square internally).\n";
  out << "space.t_amb_lo_c = " << format_double(cfg.space.dims[0].lo) << "\n";
  out << "space.t_amb_hi_c = " << format_double(cfg.space.dims[0].hi) << "\n";
  out << "space.i_max_lo_a = " << format_double(cfg.space.dims[1].lo) << "\n";
  out << "space.i_max_hi_a = " << format_double(cfg.space.dims[1].hi) << "\n";

  out << "\n# Criticality measure.\n";
  out << "crit.c_kappa = " << format_double(cfg.crit.c_kappa) << "\n";
  out << "crit.t_min_h = " << format_double(cfg.crit.t_min_h) << "\n";
  out << "crit.t_fatal_h = " << format_double(cfg.crit.t_fatal_h) << "\n";
  out << "crit.temp_min_c = " << format_double(cfg.crit.temp_min_c) << "\n";
  out << "crit.temp_fatal_c = " << format_double(cfg.crit.temp_fatal_c)
      << "\n";
}

std::string default_config_text() {
  std::ostringstream out;
  save_config(ExperimentConfig{}, out);
  return out.str();
}

}  // namespace critsearch
