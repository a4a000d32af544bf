#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "critsearch/battery_sim.hpp"
#include "critsearch/criticality.hpp"
#include "critsearch/search.hpp"

namespace critsearch {

/// Full description of one experiment, loadable from a flat
/// `section.key = value` text file so a run is reproducible from a
/// single artifact. Command-line flags override individual keys.
struct ExperimentConfig {
  std::string algorithm = "mc";  // mc | hoo | poo | doo | soo
  int budget = 4000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string output_dir = "out";
  int trace_stride = 0;  // 0: no state traces
  int grid_resolution = 101;
  int threads = 0;  // 0: one worker per hardware thread

  HooParams hoo;
  PooParams poo;
  DooParams doo;
  SooParams soo;

  SimParams sim;
  ControlLimits limits;
  ParamSpace space = ParamSpace::battery_default();
  CriticalitySpec crit;

  void validate() const;  // throws std::invalid_argument naming the field
};

/// Parses a config file. Unknown keys, malformed values and duplicate
/// scalar keys raise std::runtime_error with file:line context.
ExperimentConfig load_config(const std::string& path);

/// Parses config text from a stream (used by load_config and tests).
ExperimentConfig parse_config(std::istream& in, const std::string& origin);

/// Applies one `section.key = value` assignment (CLI overrides reuse
/// the same key names as the file format).
void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Writes cfg in the file format; load(save(cfg)) reproduces cfg.
void save_config(const ExperimentConfig& cfg, std::ostream& out);

/// The commented default template (what `configs/default.cfg` holds).
std::string default_config_text();

}  // namespace critsearch
