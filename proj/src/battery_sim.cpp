#include "critsearch/battery_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace critsearch {

namespace {

bool axis_contains(double lo, double hi, double x, double axis_end) {
  // Half-open [lo, hi); a rectangle reaching the end of the axis is
  // closed there so boundary points are always covered.
  if (x >= lo && x < hi) return true;
  return x == hi && hi >= axis_end;
}

bool overlap_1d(double a_lo, double a_hi, double b_lo, double b_hi) {
  return a_lo < b_hi && b_lo < a_hi;
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::string_view to_string(Control c) {
  switch (c) {
    case Control::Charging: return "charging";
    case Control::Resting: return "resting";
    case Control::Discharging: return "discharging";
  }
  return "unknown";
}

RFactorTable::RFactorTable(std::vector<RFactorRect> rects)
    : rects_(std::move(rects)) {
  for (const auto& r : rects_) {
    require(r.soc_lo < r.soc_hi,
            "RFactorTable: rectangle has soc_lo >= soc_hi");
    require(r.i_lo < r.i_hi, "RFactorTable: rectangle has i_lo >= i_hi");
    require(r.factor > 0.0, "RFactorTable: factor must be positive");
  }
  for (std::size_t a = 0; a < rects_.size(); ++a) {
    for (std::size_t b = a + 1; b < rects_.size(); ++b) {
      if (overlap_1d(rects_[a].soc_lo, rects_[a].soc_hi, rects_[b].soc_lo,
                     rects_[b].soc_hi) &&
          overlap_1d(rects_[a].i_lo, rects_[a].i_hi, rects_[b].i_lo,
                     rects_[b].i_hi)) {
        throw std::invalid_argument("RFactorTable: rectangles " +
                                    std::to_string(a) + " and " +
                                    std::to_string(b) + " overlap");
      }
    }
  }
}

double RFactorTable::factor(double soc, double i_charge_a) const {
  for (const auto& r : rects_) {
    if (axis_contains(r.soc_lo, r.soc_hi, soc, 1.0) &&
        axis_contains(r.i_lo, r.i_hi, i_charge_a,
                      std::numeric_limits<double>::infinity())) {
      return r.factor;
    }
  }
  return 1.0;
}

void SimParams::validate() const {
  require(b_size_ah > 0.0, "SimParams.b_size_ah must be positive");
  require(mass_kg > 0.0, "SimParams.mass_kg must be positive");
  require(c_cell_j_per_kg_k > 0.0,
          "SimParams.c_cell_j_per_kg_k must be positive");
  require(r_internal_ohm > 0.0, "SimParams.r_internal_ohm must be positive");
  require(surface_area_m2 > 0.0, "SimParams.surface_area_m2 must be positive");
  require(h_transfer_w_per_m2_k > 0.0,
          "SimParams.h_transfer_w_per_m2_k must be positive");
  require(r_a_ohm >= 0.0, "SimParams.r_a_ohm must be non-negative");
  require(ocv_slope_v >= 0.0, "SimParams.ocv_slope_v must be non-negative");
  require(soc_init >= 0.0 && soc_init < 0.95,
          "SimParams.soc_init must lie in [0, 0.95)");
  require(dt_s > 0.0, "SimParams.dt_s must be positive");
  require(t_sim_max_s >= dt_s, "SimParams.t_sim_max_s must be >= dt_s");
  // Explicit Euler on the thermal ODE is stable only for time steps
  // below the thermal time constant.
  require(dt_s < heat_capacity_j_per_k() / heat_transfer_w_per_k(),
          "SimParams.dt_s violates the Euler stability bound "
          "dt < m*c_cell / (surface_area*h_transfer)");
}

void ControlLimits::validate() const {
  require(soc_rearm < soc_full,
          "ControlLimits.soc_rearm must be below soc_full");
  require(t_bat_rearm_c < t_bat_max_approve_c,
          "ControlLimits.t_bat_rearm_c must be below t_bat_max_approve_c");
  require(t_bat_min_rearm_c > t_bat_min_approve_c,
          "ControlLimits.t_bat_min_rearm_c must be above t_bat_min_approve_c");
  require(u_bat_rearm_v < u_bat_max_approve_v,
          "ControlLimits.u_bat_rearm_v must be below u_bat_max_approve_v");
  require(fast_soc_lo < fast_soc_hi,
          "ControlLimits.fast_soc_lo must be below fast_soc_hi");
  require(fast_temp_lo_c < fast_temp_hi_c,
          "ControlLimits.fast_temp_lo_c must be below fast_temp_hi_c");
  require(i_heatup_a >= 0.0, "ControlLimits.i_heatup_a must be non-negative");
  require(i_slow_a >= 0.0, "ControlLimits.i_slow_a must be non-negative");
  require(i_rest_a >= 0.0, "ControlLimits.i_rest_a must be non-negative");
}

double soc_step(double soc, double i_charge_a, double dt_s,
                double b_size_ah) {
  double next = soc + i_charge_a * dt_s / (b_size_ah * 3600.0);
  return std::clamp(next, 0.0, 1.0);
}

double r_effective(double soc, double i_charge_a, const SimParams& p) {
  return p.r_internal_ohm * p.r_factors.factor(soc, i_charge_a);
}

double temp_step(double t_bat_c, double i_charge_a, double t_amb_c, double soc,
                 const SimParams& p, double dt_s) {
  const double r = r_effective(soc, i_charge_a, p);
  const double heating = r * i_charge_a * i_charge_a;
  const double cooling = p.heat_transfer_w_per_k() * (t_amb_c - t_bat_c);
  return t_bat_c + dt_s * (heating + cooling) / p.heat_capacity_j_per_k();
}

double voltage(double soc, double i_charge_a, const SimParams& p) {
  return p.r_a_ohm * i_charge_a + p.ocv_slope_v * soc + p.ocv0_v;
}

Control approval_step(Control prev, double soc, double t_bat_c,
                      double u_bat_v, const ControlLimits& lim) {
  if (prev == Control::Discharging || soc >= lim.soc_full) {
    return Control::Discharging;
  }
  if (prev == Control::Resting) {
    // Leave Resting only once every quantity is back inside its rearm
    // level, not merely inside the approve limit (hysteresis).
    const bool rearmed = t_bat_c <= lim.t_bat_rearm_c &&
                         t_bat_c >= lim.t_bat_min_rearm_c &&
                         u_bat_v <= lim.u_bat_rearm_v;
    return rearmed ? Control::Charging : Control::Resting;
  }
  const bool breach = t_bat_c > lim.t_bat_max_approve_c ||
                      t_bat_c < lim.t_bat_min_approve_c ||
                      u_bat_v > lim.u_bat_max_approve_v;
  return breach ? Control::Resting : Control::Charging;
}

double management_step(double soc, double t_bat_c, Control control,
                       double i_max_a, const ControlLimits& lim) {
  if (control != Control::Charging) return lim.i_rest_a;
  if (t_bat_c < lim.heatup_temp_c) return lim.i_heatup_a;
  if (soc >= lim.fast_soc_lo && soc <= lim.fast_soc_hi &&
      t_bat_c >= lim.fast_temp_lo_c && t_bat_c <= lim.fast_temp_hi_c) {
    return i_max_a;
  }
  return lim.i_slow_a;
}

double station_step(double i_demand_a, double i_max_a) {
  return std::min(i_demand_a, i_max_a);
}

SimOutcome simulate(double t_amb_c, double i_max_a, const SimParams& p,
                    const ControlLimits& lim, const StepMonitor& monitor,
                    int trace_stride) {
  p.validate();
  lim.validate();

  SimState s;
  s.t_s = 0.0;
  s.soc = p.soc_init;
  s.t_bat_c = p.t_bat_init_c;
  s.u_bat_v = voltage(s.soc, 0.0, p);
  s.control = Control::Charging;
  s.i_demand_a = 0.0;
  s.i_charge_a = 0.0;

  SimOutcome out;
  out.t_bat_peak_c = s.t_bat_c;
  out.charging_time_h = p.t_sim_max_s / 3600.0;
  out.timed_out = true;

  if (monitor) out.kappa_peak = monitor(s.t_s, s);
  if (trace_stride > 0) {
    out.trace.push_back(
        {s.t_s, s.soc, s.t_bat_c, s.u_bat_v, s.control, s.i_charge_a});
  }

  long step = 0;
  while (s.t_s < p.t_sim_max_s) {
    s.control = approval_step(s.control, s.soc, s.t_bat_c, s.u_bat_v, lim);
    if (s.control == Control::Discharging) break;

    s.i_demand_a = management_step(s.soc, s.t_bat_c, s.control, i_max_a, lim);
    s.i_charge_a = station_step(s.i_demand_a, i_max_a);
    s.u_bat_v = voltage(s.soc, s.i_charge_a, p);

    const double soc_prev = s.soc;
    s.soc = soc_step(s.soc, s.i_charge_a, p.dt_s, p.b_size_ah);
    s.t_bat_c = temp_step(s.t_bat_c, s.i_charge_a, t_amb_c, s.soc, p, p.dt_s);
    s.t_s += p.dt_s;
    ++step;

    if (!std::isfinite(s.soc) || !std::isfinite(s.t_bat_c) ||
        !std::isfinite(s.u_bat_v)) {
      throw std::runtime_error("simulate: non-finite state at step " +
                               std::to_string(step));
    }

    out.t_bat_peak_c = std::max(out.t_bat_peak_c, s.t_bat_c);
    if (monitor) out.kappa_peak = std::max(out.kappa_peak, monitor(s.t_s, s));

    if (soc_prev < lim.soc_full && s.soc >= lim.soc_full) {
      out.charging_time_h = s.t_s / 3600.0;
      out.timed_out = false;
    }
    if (trace_stride > 0 && step % trace_stride == 0) {
      out.trace.push_back(
          {s.t_s, s.soc, s.t_bat_c, s.u_bat_v, s.control, s.i_charge_a});
    }
  }

  out.steps = step;
  if (trace_stride > 0 &&
      (out.trace.empty() || out.trace.back().t_s != s.t_s)) {
    out.trace.push_back(
        {s.t_s, s.soc, s.t_bat_c, s.u_bat_v, s.control, s.i_charge_a});
  }
  return out;
}

}  // namespace critsearch
