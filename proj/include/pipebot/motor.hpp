#pragma once

#include "pipebot/types.hpp"

namespace pipebot {

struct MotorStep {
  double current = 0.0;       // [A] after dt
  double output_torque = 0.0; // gear-output torque n * Kv * i [N·m]
};

// One electrical step of di/dt = (v_coil - Kv*shaft_speed - Rm*i)/Lm with the
// motor-shaft speed held over dt (RK4, same scheme as the plant integrator).
// Torque at the gear output is n*Kv*i; the reflected inertia (Il + n^2*IR)
// shows up in the plant's mass matrix, not here.
MotorStep motor_step(double current, double shaft_speed, double v_coil,
                     const MotorParams& m, double dt);

// Static inverse map used by the controller: coil voltage that holds a given
// gear-output torque at a given wheel speed, v = Rm*T/(n*Kv) + Kv*n*omega.
double voltage_for_torque(double output_torque, double wheel_speed,
                          const MotorParams& m);

}  // namespace pipebot
