#include "pipebot/power.hpp"

#include <cmath>

namespace pipebot {

double min_capacity_ah(double hours, const MotorParams& m, int n_motors) {
  if (hours < 0) throw ValidationError("operation duration must be >= 0");
  return n_motors * m.rated_power_P * hours / m.nominal_voltage_Vn;
}

double discharge_time_hours(const BatteryModel& b, double current_draw_A) {
  if (!(current_draw_A > 0)) throw ValidationError("discharge current must be > 0");
  return b.usable_fraction(current_draw_A) * b.capacity_Ah / current_draw_A;
}

double motor_shaft_torque(double traction_N, double wheel_radius_R, double gear_ratio_n) {
  return traction_N * wheel_radius_R / gear_ratio_n;
}

double extreme_current_draw(const MotorParams& m, double shaft_torque_Nm, int n_motors) {
  return n_motors * shaft_torque_Nm / m.back_emf_Kv;
}

PowerPlan size_battery(const MotorParams& m, const BatteryModel& family,
                       double extreme_draw_A, double h_initial, double tol_hours,
                       int n_motors, int max_iterations) {
  if (!(h_initial > 0)) throw ValidationError("h_initial must be > 0");
  PowerPlan plan;
  double h = h_initial;
  BatteryModel candidate = family;  // same curve, capacity re-instantiated per pass
  for (int k = 1; k <= max_iterations; ++k) {
    plan.iterations = k;
    candidate.capacity_Ah = min_capacity_ah(h, m, n_motors);
    double h_discharge = discharge_time_hours(candidate, extreme_draw_A);
    double h_next = 0.5 * (h + h_discharge);  // damped update
    plan.capacity_Ah = candidate.capacity_Ah;
    plan.discharge_hours = h_discharge;
    if (std::abs(h_next - h) <= tol_hours) {
      h = h_next;
      plan.converged = true;
      break;
    }
    h = h_next;
  }
  plan.operation_hours = h;
  if (plan.converged) plan.capacity_Ah = min_capacity_ah(h, m, n_motors);
  return plan;
}

}  // namespace pipebot
