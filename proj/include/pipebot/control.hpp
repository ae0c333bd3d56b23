#pragma once

#include <Eigen/Dense>
#include <array>

#include "pipebot/plant.hpp"
#include "pipebot/riccati.hpp"
#include "pipebot/types.hpp"

namespace pipebot {

struct LqrGain {
  Eigen::Matrix<double, 3, 4> K;
  Eigen::Matrix4d P;
  double residual = 0.0;
  LinearizedSystem sys;
};

// LQR synthesis for the tilt subsystem: weights from ControlParams, gain from
// the Riccati solve. Throws SynthesisError when the linearisation is not
// stabilizable/detectable.
LqrGain design_lqr(const LinearizedSystem& sys, const ControlParams& params);

// State-feedback torque command (trim + -K*x2) per wheel.
Eigen::Vector3d lqr_torque(const LqrGain& gain, const Eigen::Vector4d& x2_hat);

struct TrajectoryRef {
  double v_ref = 0.0;                      // commanded body velocity after clamping
  std::array<double, 3> wheel_speed_ref{}; // per-wheel speed [rad/s]
  Eigen::Vector4d x2_ref = Eigen::Vector4d::Zero();
  bool clamped = false;
};

// Maps a desired body velocity to per-wheel speed references (pure rolling)
// with the commanded velocity clamped to the configured envelope. The tilt
// reference is the upright equilibrium.
TrajectoryRef trajectory_reference(double v_desired, const RobotGeometry& geom,
                                   double envelope);

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  bool has_prev = false;
};

struct PidResult {
  double u = 0.0;
  PidState state;
};

// One discrete PID step. freeze_integrator implements conditional
// anti-windup: the integral state is held while the output stage reports
// saturation in the direction of the current error.
PidResult pid_step(const PidState& state, const PidGains& gains, double error, double dt,
                   bool freeze_integrator = false);

struct ControllerOutput {
  Eigen::Vector3d u_total = Eigen::Vector3d::Zero();  // applied voltages
  Eigen::Vector3d u_lqr = Eigen::Vector3d::Zero();    // attitude channel [V]
  Eigen::Vector3d u_pid = Eigen::Vector3d::Zero();    // velocity channel [V]
  Eigen::Vector3d torque_cmd = Eigen::Vector3d::Zero();
  std::array<bool, 3> saturated{};
};

// Combined velocity/attitude controller: per-wheel PID on wheel-speed error
// plus LQR torque commands mapped to voltage through the steady-state motor
// model (R*T/(n*Kv) + back-EMF). Output is clamped to the voltage limit with
// integrator freeze on saturation.
class CombinedController {
 public:
  CombinedController(const MotorParams& motor, const PidGains& gains, const LqrGain& lqr,
                     double voltage_limit);

  ControllerOutput step(const Eigen::Vector4d& x2_hat,
                        const std::array<double, 3>& wheel_speed_hat,
                        const TrajectoryRef& ref, double dt);
  void reset();

  const std::array<PidState, 3>& pid_states() const { return pid_; }

 private:
  MotorParams motor_;
  PidGains gains_;
  LqrGain lqr_;
  double v_limit_;
  std::array<PidState, 3> pid_{};
  std::array<int, 3> sat_dir_{};  // -1/0/+1 saturation direction last tick
};

}  // namespace pipebot
