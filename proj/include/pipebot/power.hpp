#pragma once

#include "pipebot/types.hpp"

namespace pipebot {

// Minimum battery capacity [A·h] for n_motors motors drawing rated power P
// over `hours` at nominal voltage: C = n P h / V_n.
double min_capacity_ah(double hours, const MotorParams& m, int n_motors = 3);

// Hours until the usable charge is gone at a constant draw:
// t = usable_fraction(I) * C / I.
double discharge_time_hours(const BatteryModel& b, double current_draw_A);

// Motor-shaft torque equivalent of a per-wheel traction force.
double motor_shaft_torque(double traction_N, double wheel_radius_R, double gear_ratio_n);

// Total current when every motor holds `shaft_torque` (T = Kv * i per motor).
double extreme_current_draw(const MotorParams& m, double shaft_torque_Nm, int n_motors = 3);

struct PowerPlan {
  double capacity_Ah = 0.0;      // minimum capacity at the converged duration
  double operation_hours = 0.0;  // converged duration
  double discharge_hours = 0.0;  // discharge time of the final candidate
  int iterations = 0;
  bool converged = false;
};

// Damped fixed-point sizing loop: assume h, compute the minimum capacity,
// instantiate the battery family at that capacity, take its discharge time at
// the extreme draw as the new h (averaged with the old one). Stops when
// |h_new - h| <= tol_hours or after max_iterations.
PowerPlan size_battery(const MotorParams& m, const BatteryModel& family,
                       double extreme_draw_A, double h_initial = 3.0,
                       double tol_hours = 1e-3, int n_motors = 3,
                       int max_iterations = 100);

}  // namespace pipebot
