#include "critsearch/criticality.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace critsearch {

ParamSpace ParamSpace::battery_default() {
  ParamSpace s;
  s.dims = {{"t_amb", -5.0, 40.0, "degC"}, {"i_max", 10.0, 100.0, "A"}};
  return s;
}

void ParamSpace::validate() const {
  if (dims.empty()) {
    throw std::invalid_argument("ParamSpace: at least one dimension required");
  }
  for (const auto& d : dims) {
    if (!(d.lo < d.hi)) {
      throw std::invalid_argument("ParamSpace." + d.name +
                                  ": lower bound must be below upper bound");
    }
  }
}

void CriticalitySpec::validate() const {
  if (!(c_kappa > 0.0 && c_kappa <= 1.0)) {
    throw std::invalid_argument("CriticalitySpec.c_kappa must be in (0, 1]");
  }
  if (!(t_min_h < t_fatal_h)) {
    throw std::invalid_argument(
        "CriticalitySpec.t_min_h must be below t_fatal_h");
  }
  if (!(temp_min_c < temp_fatal_c)) {
    throw std::invalid_argument(
        "CriticalitySpec.temp_min_c must be below temp_fatal_c");
  }
}

ParamPoint denormalize(const UnitPoint& u, const ParamSpace& space) {
  if (u.size() != space.size()) {
    throw std::invalid_argument("denormalize: point dimension " +
                                std::to_string(u.size()) +
                                " does not match space dimension " +
                                std::to_string(space.size()));
  }
  ParamPoint p;
  p.values.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (!(u[k] >= 0.0 && u[k] <= 1.0)) {
      throw std::invalid_argument("denormalize: coordinate " +
                                  std::to_string(k) + " outside [0, 1]");
    }
    const auto& d = space.dims[k];
    p.values.push_back(d.lo + u[k] * (d.hi - d.lo));
  }
  return p;
}

double kappa_time(double t_charge_h, const CriticalitySpec& spec) {
  const double x =
      (t_charge_h - spec.t_min_h) / (spec.t_fatal_h - spec.t_min_h);
  return std::clamp(x, 0.0, 1.0);
}

double kappa_temp(double t_bat_c, const CriticalitySpec& spec) {
  const double x =
      (t_bat_c - spec.temp_min_c) / (spec.temp_fatal_c - spec.temp_min_c);
  return std::clamp(x, 0.0, 1.0);
}

double kappa_combine(double k_time, double k_temp) {
  return std::max(k_time, k_temp);
}

bool is_critical(double kappa, const CriticalitySpec& spec) {
  return kappa >= spec.c_kappa;
}

CriticalityObjective::CriticalityObjective(SimParams sim, ControlLimits limits,
                                           ParamSpace space,
                                           CriticalitySpec spec)
    : sim_(std::move(sim)),
      limits_(limits),
      space_(std::move(space)),
      spec_(spec) {
  sim_.validate();
  limits_.validate();
  space_.validate();
  spec_.validate();
  if (space_.size() != 2) {
    throw std::invalid_argument(
        "CriticalityObjective: the battery objective is two-dimensional "
        "(ambient temperature, station current limit)");
  }
}

double CriticalityObjective::evaluate(const UnitPoint& u) const {
  return evaluate_outcome(u).kappa_peak;
}

SimOutcome CriticalityObjective::evaluate_outcome(const UnitPoint& u,
                                                  int trace_stride) const {
  const ParamPoint p = denormalize(u, space_);
  const double t_amb_c = p.values[0];
  const double i_max_a = p.values[1];
  const auto monitor = [this](double t_s, const SimState& s) {
    return kappa_combine(kappa_time(t_s / 3600.0, spec_),
                         kappa_temp(s.t_bat_c, spec_));
  };
  return simulate(t_amb_c, i_max_a, sim_, limits_, monitor, trace_stride);
}

}  // namespace critsearch
