#pragma once

#include <Eigen/Dense>
#include <array>

#include "pipebot/types.hpp"

namespace pipebot {

// Everything the dynamics need, assembled once per run.
struct Environment {
  RobotGeometry geom;
  FrictionModel fric;
  BodyParams body;
  MotorParams motor;
  DragModel drag;
  double flow_velocity = 0.0;  // [m/s] along +x
  double pipe_radius_H = 7.0 * 0.0254;
};

Environment make_environment(const Config& cfg);

// Axial drag from relative flow: F = c * |v_rel| * v_rel, v_rel = flow - v.
double drag_force(const DragModel& d, double robot_velocity, double flow_velocity);

struct PlantState {
  double s = 0.0;        // axial position [m]
  double v = 0.0;        // axial velocity [m/s]
  double phi = 0.0;      // roll about the pipe axis [rad]
  double phi_dot = 0.0;
  double psi = 0.0;      // pitch [rad]
  double psi_dot = 0.0;
  std::array<double, 3> wheel_speeds{};   // [rad/s], rolling-consistent
  std::array<double, 3> motor_currents{}; // [A]
};

struct DivergenceError : std::runtime_error {
  PlantState last_state;
  double time = 0.0;
  DivergenceError(const std::string& what, const PlantState& s, double t)
      : std::runtime_error(what), last_state(s), time(t) {}
};

// Contact Jacobian row for wheel i: rim speed = J_i . (v, phi_dot, psi_dot).
// Wheels sit at stations 90/210/330 deg; roll couples through rho*H*cos(g_i),
// pitch through the exact traction lever H*sin(g_i).
Eigen::Matrix<double, 3, 3> contact_jacobian(const Environment& env);

// Wheel speeds implied by pure rolling at the given body rates.
std::array<double, 3> rolling_wheel_speeds(double v, double phi_dot, double psi_dot,
                                           const Environment& env);

struct PlantDerivative {
  PlantState xdot;                    // d/dt of every state field
  std::array<double, 3> traction{};   // contact force per wheel [N]
  bool slip = false;                  // any |traction| beyond mu_s * F_N
};

// Torque-level dynamics: u = gear-output torques. The (phi, phi_dot, psi,
// psi_dot) sub-derivative is the stabilizing model f2 the LQR is designed on.
// On slip the traction is saturated at mu_s*F_N and integration continues.
// Motor currents are not exercised at this level (their derivative is 0).
PlantDerivative plant_derivative(const PlantState& x, const Eigen::Vector3d& u_torques,
                                 const Environment& env);

// f2(x2, u): tilt sub-dynamics at v = 0 used for trim and linearization.
Eigen::Vector4d f2(const Eigen::Vector4d& x2, const Eigen::Vector3d& u,
                   const Environment& env);

struct StepResult {
  PlantState state;
  std::array<double, 3> traction{};
  bool slip = false;
};

// Voltage-level RK4 step: coil voltages drive the electrical states, torques
// n*Kv*i drive the mechanics; single monolithic state vector. Sub-steps x10
// when the electrical time constant is within 5x of dt. Throws
// DivergenceError (carrying the last finite state) when the state leaves
// finite range. dt must lie in (0, 10 ms].
StepResult step(const PlantState& x, const Eigen::Vector3d& u_voltages,
                const Environment& env, double dt, double t_now = 0.0);

// Declared energy functions of the fixture model (exact for the audit test).
double kinetic_energy(const PlantState& x, const Environment& env);
double potential_energy(const PlantState& x, const Environment& env);

struct LinearizedSystem {
  Eigen::Matrix4d A2;
  Eigen::Matrix<double, 4, 3> B2;
  Eigen::Matrix<double, 2, 4> C2;  // fixed: [[0,1,0,0],[0,0,1,0]]
  Eigen::Matrix<double, 2, 3> D2;  // zero
  Eigen::Vector3d trim_input_u0;
};

// Holding torques: damped Newton (pseudo-inverse step) on f2(0, u) = 0 from
// an equal torque split. The coupling is linear so this lands in one step;
// the minimum-norm solution carries zero net thrust by the 120-deg symmetry.
Eigen::Vector3d solve_trim(const Environment& env);

// Central differences about (x2 = 0, u = u0), step 1e-6 * max(1, |component|).
LinearizedSystem linearize(const Environment& env);

}  // namespace pipebot
