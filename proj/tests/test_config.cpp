#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <stdexcept>
#include <string>

#include "critsearch/config.hpp"

using namespace critsearch;

namespace {

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in, "test");
}

std::string error_of(const std::string& text) {
  try {
    parse_text(text);
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults survive a save/load round trip") {
  const ExperimentConfig def;
  std::ostringstream out;
  save_config(def, out);
  const ExperimentConfig back = parse_text(out.str());

  CHECK(back.algorithm == def.algorithm);
  CHECK(back.budget == def.budget);
  CHECK(back.seeds == def.seeds);
  CHECK(back.output_dir == def.output_dir);
  CHECK(back.trace_stride == def.trace_stride);
  CHECK(back.grid_resolution == def.grid_resolution);
  CHECK(back.threads == def.threads);
  CHECK(back.hoo.nu1 == def.hoo.nu1);
  CHECK(back.hoo.rho == def.hoo.rho);
  CHECK(back.poo.nu_max == def.poo.nu_max);
  CHECK(back.poo.rho_max == def.poo.rho_max);
  CHECK(back.doo.nu1 == def.doo.nu1);
  CHECK(back.doo.rho == def.doo.rho);
  CHECK(back.soo.epsilon == def.soo.epsilon);
  CHECK(back.sim.b_size_ah == def.sim.b_size_ah);
  CHECK(back.sim.mass_kg == def.sim.mass_kg);
  CHECK(back.sim.c_cell_j_per_kg_k == def.sim.c_cell_j_per_kg_k);
  CHECK(back.sim.r_internal_ohm == def.sim.r_internal_ohm);
  CHECK(back.sim.dt_s == def.sim.dt_s);
  CHECK(back.sim.t_sim_max_s == def.sim.t_sim_max_s);
  REQUIRE(back.sim.r_factors.rects().size() ==
          def.sim.r_factors.rects().size());
  for (std::size_t i = 0; i < def.sim.r_factors.rects().size(); ++i) {
    CHECK(back.sim.r_factors.rects()[i].soc_lo ==
          def.sim.r_factors.rects()[i].soc_lo);
    CHECK(back.sim.r_factors.rects()[i].i_lo ==
          def.sim.r_factors.rects()[i].i_lo);
    CHECK(back.sim.r_factors.rects()[i].i_hi ==
          def.sim.r_factors.rects()[i].i_hi);
    CHECK(back.sim.r_factors.rects()[i].factor ==
          def.sim.r_factors.rects()[i].factor);
  }
  CHECK(back.limits.t_bat_max_approve_c == def.limits.t_bat_max_approve_c);
  CHECK(back.limits.t_bat_rearm_c == def.limits.t_bat_rearm_c);
  CHECK(back.limits.fast_temp_hi_c == def.limits.fast_temp_hi_c);
  CHECK(back.space.dims[0].lo == def.space.dims[0].lo);
  CHECK(back.space.dims[1].hi == def.space.dims[1].hi);
  CHECK(back.crit.c_kappa == def.crit.c_kappa);
  CHECK(back.crit.temp_fatal_c == def.crit.temp_fatal_c);

  CHECK_NOTHROW(back.validate());
}

TEST_CASE("mutated config round trips exactly") {
  ExperimentConfig cfg;
  cfg.algorithm = "soo";
  cfg.budget = 123;
  cfg.seeds = {42, 7};
  cfg.output_dir = "results/x";
  cfg.trace_stride = 5;
  cfg.threads = 2;
  cfg.soo.epsilon = 0.75;
  cfg.sim.r_internal_ohm = 0.0007;

  std::ostringstream out;
  save_config(cfg, out);
  const ExperimentConfig back = parse_text(out.str());
  CHECK(back.algorithm == "soo");
  CHECK(back.budget == 123);
  CHECK(back.seeds == std::vector<std::uint64_t>{42, 7});
  CHECK(back.output_dir == "results/x");
  CHECK(back.trace_stride == 5);
  CHECK(back.threads == 2);
  CHECK(back.soo.epsilon == 0.75);
  CHECK(back.sim.r_internal_ohm == 0.0007);
}

TEST_CASE("default template text parses to the default config") {
  const ExperimentConfig back = parse_text(default_config_text());
  const ExperimentConfig def;
  CHECK(back.algorithm == def.algorithm);
  CHECK(back.budget == def.budget);
  CHECK(back.sim.b_size_ah == def.sim.b_size_ah);
  CHECK(back.limits.t_bat_rearm_c == def.limits.t_bat_rearm_c);
  CHECK_NOTHROW(back.validate());
}

TEST_CASE("comments, blank lines and inline comments are ignored") {
  const ExperimentConfig cfg = parse_text(
      "# leading comment\n"
      "\n"
      "run.budget = 17  # trailing note\n"
      "   run.algorithm = doo\n");
  CHECK(cfg.budget == 17);
  CHECK(cfg.algorithm == "doo");
}

TEST_CASE("parse errors carry file and line context") {
  SUBCASE("unknown key") {
    const std::string msg = error_of("foo.bar = 1\n");
    CHECK(msg.find("test:1") != std::string::npos);
    CHECK(msg.find("foo.bar") != std::string::npos);
  }
  SUBCASE("malformed value") {
    const std::string msg = error_of("run.budget = soon\n");
    CHECK(msg.find("test:1") != std::string::npos);
    CHECK(msg.find("soon") != std::string::npos);
  }
  SUBCASE("missing assignment") {
    const std::string msg = error_of("# ok\nrun.budget\n");
    CHECK(msg.find("test:2") != std::string::npos);
  }
  SUBCASE("duplicate scalar key") {
    const std::string msg = error_of("run.budget = 1\nrun.budget = 2\n");
    CHECK(msg.find("test:2") != std::string::npos);
    CHECK(msg.find("duplicate") != std::string::npos);
  }
  SUBCASE("bad seeds list") {
    CHECK(error_of("run.seeds = 1 two 3\n").find("test:1") !=
          std::string::npos);
    CHECK(error_of("run.seeds =\n").find("seed") != std::string::npos);
  }
}

TEST_CASE("r_factor entries accumulate and are validated") {
  SUBCASE("repeated keys add rectangles") {
    const ExperimentConfig cfg = parse_text(
        "sim.r_factor = 0 0.5 10 20 2\n"
        "sim.r_factor = 0.5 1 10 20 3\n");
    // The configured table replaces the built-in default.
    REQUIRE(cfg.sim.r_factors.rects().size() == 2);
    CHECK(cfg.sim.r_factors.factor(0.25, 15.0) == 2.0);
    CHECK(cfg.sim.r_factors.factor(0.75, 15.0) == 3.0);
    CHECK(cfg.sim.r_factors.factor(0.25, 25.0) == 1.0);
  }
  SUBCASE("wrong arity is rejected") {
    CHECK(error_of("sim.r_factor = 0 0.5 10 20\n").find("test:1") !=
          std::string::npos);
  }
  SUBCASE("overlap is rejected at parse time") {
    const std::string msg = error_of(
        "sim.r_factor = 0 0.6 10 20 2\n"
        "sim.r_factor = 0.5 1 15 25 3\n");
    CHECK(msg.find("overlap") != std::string::npos);
  }
  SUBCASE("inf is an accepted current bound") {
    const ExperimentConfig cfg = parse_text("sim.r_factor = 0 1 58 inf 40\n");
    CHECK(cfg.sim.r_factors.factor(0.5, 1e12) == 40.0);
  }
}

TEST_CASE("apply_config_entry drives single-key overrides") {
  ExperimentConfig cfg;
  apply_config_entry(cfg, "run.budget", "99");
  CHECK(cfg.budget == 99);
  apply_config_entry(cfg, "soo.epsilon", "0.8");
  CHECK(cfg.soo.epsilon == 0.8);
  apply_config_entry(cfg, "limits.t_bat_rearm_c", "38.5");
  CHECK(cfg.limits.t_bat_rearm_c == 38.5);
  CHECK_THROWS_AS(apply_config_entry(cfg, "nope", "1"), std::runtime_error);
}

TEST_CASE("config validation names the offending field") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  SUBCASE("algorithm") {
    cfg.algorithm = "bogus";
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("budget") {
    cfg.budget = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("seeds") {
    cfg.seeds.clear();
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("grid resolution") {
    cfg.grid_resolution = 1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("epsilon range") {
    cfg.soo.epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.soo.epsilon = 1.0;
    CHECK_NOTHROW(cfg.validate());
    cfg.soo.epsilon = 1.0001;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("hoo rho range") {
    cfg.hoo.rho = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
  SUBCASE("simulator fields propagate") {
    cfg.sim.dt_s = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  }
}
