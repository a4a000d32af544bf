#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace critsearch {

/// Charging approval state of the battery management system.
/// Discharging is terminal: the battery is full and the run ends.
enum class Control { Charging, Resting, Discharging };

std::string_view to_string(Control c);

/// Scaling factor for the internal resistance over a (soc, current)
/// rectangle. Rectangles are half-open in both axes, [lo, hi), except
/// that a rectangle whose upper edge coincides with the physical end of
/// the axis (soc = 1, or an infinite current bound) is closed there.
struct RFactorRect {
  double soc_lo = 0.0;
  double soc_hi = 1.0;
  double i_lo = 0.0;
  double i_hi = 0.0;
  double factor = 1.0;
};

/// Piecewise-constant resistance-factor table. An empty table is the
/// identity (factor 1 everywhere); points not covered by any rectangle
/// also map to 1.
class RFactorTable {
 public:
  RFactorTable() = default;
  /// Throws std::invalid_argument if any two rectangles overlap or a
  /// rectangle is empty/inverted.
  explicit RFactorTable(std::vector<RFactorRect> rects);

  double factor(double soc, double i_charge_a) const;
  bool empty() const { return rects_.empty(); }
  const std::vector<RFactorRect>& rects() const { return rects_; }

 private:
  std::vector<RFactorRect> rects_;
};

/// Physical battery and integration parameters. Defaults are the
/// calibrated charging system used throughout the test pipeline; see
/// configs/default.cfg for the same values in config form.
struct SimParams {
  double b_size_ah = 30.0;          // battery capacity
  double mass_kg = 30.0;            // cell mass
  double c_cell_j_per_kg_k = 780.0; // specific heat capacity
  double r_internal_ohm = 0.0012;   // ohmic loss resistance (heating)
  double surface_area_m2 = 1.5;     // convective surface
  double h_transfer_w_per_m2_k = 10.0;
  double r_a_ohm = 0.01;            // series resistance in the voltage model
  double ocv0_v = 21.6;             // open-circuit voltage at soc = 0
  double ocv_slope_v = 4.8;         // OCV rise from soc 0 to 1
  double soc_init = 0.0;
  double t_bat_init_c = 20.0;
  double dt_s = 1.0;
  double t_sim_max_s = 32400.0;     // 9 h charging deadline
  // Ohmic resistance climbs steeply in the high-current regime; this
  // is what confines thermal runaways to the upper-right of the
  // parameter space.
  RFactorTable r_factors{{RFactorRect{
      0.0, 1.0, 58.0, std::numeric_limits<double>::infinity(), 40.0}}};

  double heat_capacity_j_per_k() const { return mass_kg * c_cell_j_per_kg_k; }
  double heat_transfer_w_per_k() const {
    return surface_area_m2 * h_transfer_w_per_m2_k;
  }

  /// Throws std::invalid_argument naming the offending field. Also
  /// enforces the forward-Euler stability bound dt < m*c / (A*h).
  void validate() const;
};

/// Approval thresholds and charging-management constants. Each approve
/// limit pairs with a rearm level strictly inside it (hysteresis).
struct ControlLimits {
  double soc_full = 0.95;
  double soc_rearm = 0.93;
  double t_bat_max_approve_c = 40.0;
  double t_bat_rearm_c = 39.0;
  double t_bat_min_approve_c = -10.0;
  double t_bat_min_rearm_c = -8.0;
  double u_bat_max_approve_v = 29.0;
  double u_bat_rearm_v = 28.5;
  double heatup_temp_c = 5.0;  // below this the charger only heats the cell
  double fast_soc_lo = 0.05;
  double fast_soc_hi = 0.85;
  double fast_temp_lo_c = 5.0;
  double fast_temp_hi_c = 40.0;
  double i_heatup_a = 30.0;
  double i_slow_a = 20.0;
  double i_rest_a = 0.0;

  void validate() const;
};

struct SimState {
  double t_s = 0.0;
  double soc = 0.0;
  double t_bat_c = 0.0;
  double u_bat_v = 0.0;
  Control control = Control::Charging;
  double i_demand_a = 0.0;
  double i_charge_a = 0.0;
};

struct TraceRow {
  double t_s;
  double soc;
  double t_bat_c;
  double u_bat_v;
  Control control;
  double i_charge_a;
};

struct SimOutcome {
  double charging_time_h = 0.0;  // first time soc >= soc_full, else the cap
  bool timed_out = false;        // deadline hit before reaching soc_full
  double t_bat_peak_c = 0.0;     // max temperature incl. the initial state
  double kappa_peak = 0.0;       // max monitor value; 0 without a monitor
  long steps = 0;
  std::vector<TraceRow> trace;   // filled when trace_stride > 0
};

/// Coulomb-counting SoC update, clamped to [0, 1].
double soc_step(double soc, double i_charge_a, double dt_s, double b_size_ah);

/// r_internal scaled by the factor table at (soc, i).
double r_effective(double soc, double i_charge_a, const SimParams& p);

/// One explicit forward-Euler step of the lumped thermal model
///   m*c * dT/dt = r*I^2 + A*h*(T_amb - T_bat),  r = r_effective(soc, i).
double temp_step(double t_bat_c, double i_charge_a, double t_amb_c, double soc,
                 const SimParams& p, double dt_s);

/// Linear terminal-voltage model u = r_a*i + ocv_slope*soc + ocv0.
double voltage(double soc, double i_charge_a, const SimParams& p);

/// Approval state machine with per-quantity hysteresis. Reads the
/// previous step's measurements. Discharging (soc >= soc_full) is
/// terminal and takes precedence over everything else.
Control approval_step(Control prev, double soc, double t_bat_c, double u_bat_v,
                      const ControlLimits& lim);

/// Charging-mode selection: Rest (not approved) > Heat Up (cold cell) >
/// Fast Charge (mid SoC, moderate temperature) > Slow Charge.
/// Returns the demanded current in ampere.
double management_step(double soc, double t_bat_c, Control control,
                       double i_max_a, const ControlLimits& lim);

/// The charging station delivers min(demand, i_max).
double station_step(double i_demand_a, double i_max_a);

/// Per-step criticality callback: receives the elapsed time and the
/// freshly updated state, returns an instantaneous criticality value.
using StepMonitor = std::function<double(double t_s, const SimState& s)>;

/// Runs the charging episode at fixed ambient temperature and station
/// current limit until the battery is full or the deadline passes.
///
/// Update order within one step (each stage reads values already
/// written this step, everything else from the previous step):
///   approval -> management -> station -> voltage -> SoC -> temperature.
///
/// The monitor is invoked on the initial state and after every step;
/// kappa_peak is the running maximum of its return values. A
/// trace_stride of k > 0 records the initial state, every k-th step and
/// the final step. Throws std::runtime_error naming the step index if
/// the state turns non-finite.
SimOutcome simulate(double t_amb_c, double i_max_a, const SimParams& p,
                    const ControlLimits& lim, const StepMonitor& monitor = {},
                    int trace_stride = 0);

}  // namespace critsearch
