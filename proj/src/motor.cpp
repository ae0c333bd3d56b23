#include "pipebot/motor.hpp"

namespace pipebot {

MotorStep motor_step(double current, double shaft_speed, double v_coil,
                     const MotorParams& m, double dt) {
  auto didt = [&](double i) {
    return (v_coil - m.back_emf_Kv * shaft_speed - m.terminal_resistance_Rm * i) /
           m.terminal_inductance_Lm;
  };
  double k1 = didt(current);
  double k2 = didt(current + 0.5 * dt * k1);
  double k3 = didt(current + 0.5 * dt * k2);
  double k4 = didt(current + dt * k3);
  double i_next = current + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  return {i_next, m.gear_ratio_n * m.back_emf_Kv * i_next};
}

double voltage_for_torque(double output_torque, double wheel_speed, const MotorParams& m) {
  double i = output_torque / (m.gear_ratio_n * m.back_emf_Kv);
  double shaft_speed = m.gear_ratio_n * wheel_speed;
  return m.terminal_resistance_Rm * i + m.back_emf_Kv * shaft_speed;
}

}  // namespace pipebot
