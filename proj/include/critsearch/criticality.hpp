#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "critsearch/battery_sim.hpp"

namespace critsearch {

/// A point in the normalized test space [0,1]^d.
using UnitPoint = std::vector<double>;

struct ParamDim {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::string unit;
};

/// Axis-aligned box of physical test parameters. The battery case is
/// two-dimensional: ambient temperature x station current limit.
struct ParamSpace {
  std::vector<ParamDim> dims;

  static ParamSpace battery_default();
  std::size_t size() const { return dims.size(); }
  void validate() const;
};

/// Physical parameter vector matching a ParamSpace.
struct ParamPoint {
  std::vector<double> values;
};

/// Thresholds of the criticality measure. A charging episode is rated
/// by how close it comes to the two requirement violations: taking
/// longer than t_fatal_h hours, or heating beyond temp_fatal_c.
struct CriticalitySpec {
  double c_kappa = 0.8;       // critical-event threshold (inclusive)
  double t_min_h = 0.0;
  double t_fatal_h = 9.0;
  double temp_min_c = -5.0;
  double temp_fatal_c = 63.75;

  void validate() const;
};

/// Maps u in [0,1]^d to physical coordinates, lo + u*(hi - lo).
ParamPoint denormalize(const UnitPoint& u, const ParamSpace& space);

/// min(max((t - t_min) / (t_fatal - t_min), 0), 1)
double kappa_time(double t_charge_h, const CriticalitySpec& spec);

/// min(max((T - temp_min) / (temp_fatal - temp_min), 0), 1)
double kappa_temp(double t_bat_c, const CriticalitySpec& spec);

/// Combined criticality: the worse of the two components.
double kappa_combine(double k_time, double k_temp);

bool is_critical(double kappa, const CriticalitySpec& spec);

/// Deterministic objective kappa(u): denormalizes u, runs the charging
/// simulation and returns the highest instantaneous criticality seen
/// during the episode (including the initial state).
class CriticalityObjective {
 public:
  CriticalityObjective(SimParams sim, ControlLimits limits, ParamSpace space,
                       CriticalitySpec spec);

  /// Throws std::invalid_argument if u has the wrong dimension or
  /// leaves [0,1]^d.
  double evaluate(const UnitPoint& u) const;

  /// Same episode, full outcome (for traces and diagnostics).
  SimOutcome evaluate_outcome(const UnitPoint& u, int trace_stride = 0) const;

  const SimParams& sim() const { return sim_; }
  const ControlLimits& limits() const { return limits_; }
  const ParamSpace& space() const { return space_; }
  const CriticalitySpec& spec() const { return spec_; }

 private:
  SimParams sim_;
  ControlLimits limits_;
  ParamSpace space_;
  CriticalitySpec spec_;
};

}  // namespace critsearch
