#include "pipebot/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace pipebot {

namespace {

// Gravity direction in body axes for the attitude R_x(phi)R_y(psi).
Eigen::Vector3d gravity_body(double phi, double psi) {
  return {std::sin(psi) * std::cos(phi), -std::sin(phi), -std::cos(phi) * std::cos(psi)};
}

}  // namespace

ImuSample imu_sense(const PlantState& x, const NoiseSpec& noise, std::mt19937_64& rng,
                    double t, double gravity) {
  // Body angular velocity of R_x(phi)R_y(psi): phi_dot enters about the
  // world x axis expressed in body coordinates, psi_dot about body y.
  const double cpsi = std::cos(x.psi);
  const double spsi = std::sin(x.psi);
  Eigen::Vector3d w(x.phi_dot * cpsi, x.psi_dot, x.phi_dot * spsi);
  Eigen::Vector3d a = gravity * gravity_body(x.phi, x.psi);

  std::normal_distribution<double> unit(0.0, 1.0);
  ImuSample s;
  for (int k = 0; k < 3; ++k) s.gyro[k] = w[k] + noise.gyro_bias[k] + noise.gyro_sigma * unit(rng);
  for (int k = 0; k < 3; ++k) s.accel[k] = a[k] + noise.accel_sigma * unit(rng);
  s.t = t;
  return s;
}

static void extract_tilt(AttitudeEstimate& est) {
  const Eigen::Vector3d v = est.q.conjugate() * Eigen::Vector3d(0, 0, -1);
  est.phi_hat = std::asin(std::clamp(-v.y(), -1.0, 1.0));
  est.psi_hat = std::atan2(v.x(), -v.z());
}

AttitudeEstimate mahony_update(const AttitudeEstimate& est, const ImuSample& s,
                               const MahonyGains& g, double dt) {
  AttitudeEstimate next = est;
  Eigen::Vector3d err = Eigen::Vector3d::Zero();
  const double norm = s.accel.norm();
  if (norm > 1e-12) {
    const Eigen::Vector3d v_meas = s.accel / norm;
    const Eigen::Vector3d v_est = est.q.conjugate() * Eigen::Vector3d(0, 0, -1);
    err = v_meas.cross(v_est);
  }
  next.integral += g.ki * err * dt;
  const Eigen::Vector3d w = s.gyro + g.kp * err + next.integral;

  // q_dot = q * (0, w/2); first-order integration then renormalise.
  Eigen::Quaterniond wq(0.0, 0.5 * w.x(), 0.5 * w.y(), 0.5 * w.z());
  Eigen::Quaterniond dq = next.q * wq;
  next.q.w() += dq.w() * dt;
  next.q.x() += dq.x() * dt;
  next.q.y() += dq.y() * dt;
  next.q.z() += dq.z() * dt;
  next.q.normalize();
  extract_tilt(next);
  return next;
}

AttitudeEstimate attitude_from_accel(const Eigen::Vector3d& accel) {
  AttitudeEstimate est;
  const double norm = accel.norm();
  if (norm > 1e-12) {
    const Eigen::Vector3d v = accel / norm;
    const double phi = std::asin(std::clamp(-v.y(), -1.0, 1.0));
    const double psi = std::atan2(v.x(), -v.z());
    est.q = Eigen::Quaterniond(Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitX()) *
                               Eigen::AngleAxisd(psi, Eigen::Vector3d::UnitY()));
  }
  extract_tilt(est);
  return est;
}

Eigen::Vector2d tilt_rates(const AttitudeEstimate& est, const Eigen::Vector3d& gyro) {
  const Eigen::Vector3d w = gyro + est.integral;  // integral path cancels bias
  const double cpsi = std::cos(est.psi_hat);
  const double spsi = std::sin(est.psi_hat);
  return {w.x() * cpsi + w.z() * spsi, w.y()};
}

EncoderStream encoder_sense(const EncoderStream& stream,
                            const std::array<double, 3>& wheel_speeds, double dt) {
  EncoderStream next = stream;
  const double spacing = 2.0 * M_PI / stream.pulses_per_rev;
  for (int i = 0; i < 3; ++i) {
    const double w = wheel_speeds[i];
    const double th0 = stream.angle[i];
    const double th1 = th0 + w * dt;
    if (w > 0.0) {
      for (long m = static_cast<long>(std::floor(th0 / spacing)) + 1;
           m * spacing <= th1; ++m) {
        const double tc = stream.t + (m * spacing - th0) / w;
        if (next.pulse_count[i] > 0) next.inter_pulse[i] = tc - next.last_pulse_t[i];
        next.last_pulse_t[i] = tc;
        next.direction[i] = 1;
        ++next.pulse_count[i];
      }
    } else if (w < 0.0) {
      for (long m = static_cast<long>(std::ceil(th0 / spacing)) - 1;
           m * spacing >= th1; --m) {
        const double tc = stream.t + (m * spacing - th0) / w;
        if (next.pulse_count[i] > 0) next.inter_pulse[i] = tc - next.last_pulse_t[i];
        next.last_pulse_t[i] = tc;
        next.direction[i] = -1;
        ++next.pulse_count[i];
      }
    }
    next.angle[i] = th1;
  }
  next.t = stream.t + dt;
  return next;
}

std::optional<double> encoder_velocity(const EncoderStream& stream, int wheel,
                                       double wheel_radius) {
  if (stream.pulse_count[wheel] < 2 || stream.inter_pulse[wheel] <= 0.0) return std::nullopt;
  const double v = 2.0 * M_PI * wheel_radius /
                   (stream.pulses_per_rev * stream.inter_pulse[wheel]);
  return stream.direction[wheel] >= 0 ? v : -v;
}

double encoder_wheel_speed(const EncoderStream& stream, int wheel) {
  if (stream.pulse_count[wheel] < 2 || stream.inter_pulse[wheel] <= 0.0) return 0.0;
  // When no pulse has arrived for longer than the last inter-pulse time the
  // wheel must have slowed; use the elapsed time as the period estimate.
  const double tc = std::max(stream.inter_pulse[wheel], stream.t - stream.last_pulse_t[wheel]);
  const double w = 2.0 * M_PI / (stream.pulses_per_rev * tc);
  return stream.direction[wheel] >= 0 ? w : -w;
}

double MedianWindow::push(double x) {
  buf_.push_back(x);
  if (static_cast<int>(buf_.size()) > window_) buf_.erase(buf_.begin());
  std::vector<double> sorted = buf_;
  std::sort(sorted.begin(), sorted.end());
  return sorted[sorted.size() / 2];
}

void MedianWindow::reset() { buf_.clear(); }

}  // namespace pipebot
