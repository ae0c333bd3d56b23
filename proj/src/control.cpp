#include "pipebot/control.hpp"

#include <algorithm>
#include <cmath>

#include "pipebot/motor.hpp"

namespace pipebot {

LqrGain design_lqr(const LinearizedSystem& sys, const ControlParams& params) {
  Eigen::Matrix4d Q = Eigen::Vector4d(params.lqr_q_diag[0], params.lqr_q_diag[1],
                                      params.lqr_q_diag[2], params.lqr_q_diag[3])
                          .asDiagonal();
  Eigen::Matrix3d R = params.lqr_r_diag * Eigen::Matrix3d::Identity();
  const CareSolution care = solve_riccati(sys.A2, sys.B2, Q, R);
  LqrGain gain;
  gain.K = care.K;
  gain.P = care.P;
  gain.residual = care.residual;
  gain.sys = sys;
  return gain;
}

Eigen::Vector3d lqr_torque(const LqrGain& gain, const Eigen::Vector4d& x2_hat) {
  return gain.sys.trim_input_u0 - gain.K * x2_hat;
}

TrajectoryRef trajectory_reference(double v_desired, const RobotGeometry& geom,
                                   double envelope) {
  TrajectoryRef ref;
  ref.v_ref = std::clamp(v_desired, -envelope, envelope);
  ref.clamped = ref.v_ref != v_desired;
  const double w = ref.v_ref / geom.wheel_radius_R;
  ref.wheel_speed_ref = {w, w, w};
  return ref;
}

PidResult pid_step(const PidState& state, const PidGains& gains, double error, double dt,
                   bool freeze_integrator) {
  PidResult res;
  res.state = state;
  if (!freeze_integrator) res.state.integral += error * dt;
  const double deriv = state.has_prev ? (error - state.prev_error) / dt : 0.0;
  res.state.prev_error = error;
  res.state.has_prev = true;
  res.u = gains.kp * error + gains.ki * res.state.integral + gains.kd * deriv;
  return res;
}

CombinedController::CombinedController(const MotorParams& motor, const PidGains& gains,
                                       const LqrGain& lqr, double voltage_limit)
    : motor_(motor), gains_(gains), lqr_(lqr), v_limit_(voltage_limit) {}

void CombinedController::reset() {
  pid_ = {};
  sat_dir_ = {};
}

ControllerOutput CombinedController::step(const Eigen::Vector4d& x2_hat,
                                          const std::array<double, 3>& wheel_speed_hat,
                                          const TrajectoryRef& ref, double dt) {
  ControllerOutput out;
  out.torque_cmd = lqr_torque(lqr_, x2_hat);
  for (int i = 0; i < 3; ++i) {
    out.u_lqr[i] = voltage_for_torque(out.torque_cmd[i], wheel_speed_hat[i], motor_);

    const double err = ref.wheel_speed_ref[i] - wheel_speed_hat[i];
    // Conditional anti-windup: hold the integrator while the output stage is
    // saturated in the direction the current error keeps pushing.
    const bool freeze = sat_dir_[i] != 0 && err * sat_dir_[i] > 0.0;
    PidResult pid = pid_step(pid_[i], gains_, err, dt, freeze);
    double total = pid.u + out.u_lqr[i];
    const double clamped = std::clamp(total, -v_limit_, v_limit_);
    if (!freeze && clamped != total && err * (total - clamped) > 0.0) {
      // Saturating this very tick: redo with the integrator held.
      pid = pid_step(pid_[i], gains_, err, dt, true);
      total = pid.u + out.u_lqr[i];
    }
    pid_[i] = pid.state;
    out.u_pid[i] = pid.u;
    out.u_total[i] = std::clamp(total, -v_limit_, v_limit_);
    out.saturated[i] = out.u_total[i] != total;
    sat_dir_[i] = !out.saturated[i] ? 0 : (total > 0.0 ? 1 : -1);
  }
  return out;
}

}  // namespace pipebot
