#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "pipebot/estimation.hpp"

using namespace pipebot;

namespace {

ImuSample exact_sample(double phi, double psi, double phi_dot = 0.0, double psi_dot = 0.0) {
  PlantState x;
  x.phi = phi;
  x.psi = psi;
  x.phi_dot = phi_dot;
  x.psi_dot = psi_dot;
  NoiseSpec quiet;
  std::mt19937_64 rng(0);
  return imu_sense(x, quiet, rng, 0.0);
}

}  // namespace

TEST_CASE("level accelerometer reads straight-down gravity") {
  const ImuSample s = exact_sample(0.0, 0.0);
  CHECK(s.accel.x() == 0.0);
  CHECK(s.accel.y() == 0.0);
  CHECK(s.accel.z() == doctest::Approx(-9.80665).epsilon(1e-15));
  CHECK(s.gyro.norm() == 0.0);
}

TEST_CASE("tilt extraction from a single accel sample is exact") {
  for (double phi : {-0.3, -0.05, 0.0, 0.2, 0.45}) {
    for (double psi : {-0.4, 0.0, 0.1, 0.35}) {
      const ImuSample s = exact_sample(phi, psi);
      const AttitudeEstimate est = attitude_from_accel(s.accel);
      CHECK(est.phi_hat == doctest::Approx(phi).epsilon(1e-12));
      CHECK(est.psi_hat == doctest::Approx(psi).epsilon(1e-12));
    }
  }
}

TEST_CASE("body-rate convention inverts exactly at the true attitude") {
  const double phi = 0.17, psi = -0.28, phi_dot = 0.9, psi_dot = -1.4;
  const ImuSample s = exact_sample(phi, psi, phi_dot, psi_dot);
  AttitudeEstimate est = attitude_from_accel(s.accel);
  const Eigen::Vector2d rates = tilt_rates(est, s.gyro);
  CHECK(rates[0] == doctest::Approx(phi_dot).epsilon(1e-12));
  CHECK(rates[1] == doctest::Approx(psi_dot).epsilon(1e-12));
}

TEST_CASE("static convergence follows the first-order error model") {
  // A stationary truth 10 degrees off: small-angle filter error obeys
  // eps_dot = -kp * eps, so eps(t) = eps0 * exp(-kp t).
  const double phi_true = 10.0 * M_PI / 180.0;
  const ImuSample s = exact_sample(phi_true, 0.0);
  MahonyGains g{1.0, 0.0};
  AttitudeEstimate est;  // identity start
  const double dt = 0.01;
  for (int k = 1; k <= 800; ++k) {
    est = mahony_update(est, s, g, dt);
    const double t = k * dt;
    const double eps_model = phi_true * std::exp(-g.kp * t);
    const double eps = phi_true - est.phi_hat;
    CHECK(std::abs(eps - eps_model) <= 0.2 * eps_model + 1e-4);
  }
  // eight time constants in: initial error reduced by e^-8
  CHECK(std::abs(est.phi_hat - phi_true) <= 2e-4);
}

TEST_CASE("integral path absorbs a constant gyro bias") {
  NoiseSpec n;
  n.gyro_bias = {0.02, -0.015, 0.01};
  PlantState x;
  x.phi = 0.1;
  x.psi = -0.05;
  std::mt19937_64 rng(5);
  MahonyGains g{2.0, 0.5};
  AttitudeEstimate est;
  ImuSample s;
  for (int k = 0; k < 60000; ++k) {
    s = imu_sense(x, n, rng, k * 0.01);
    est = mahony_update(est, s, g, 0.01);
  }
  // attitude pinned despite the bias...
  CHECK(std::abs(est.phi_hat - x.phi) <= 2e-3);
  CHECK(std::abs(est.psi_hat - x.psi) <= 2e-3);
  // ...and the corrected rates average out near zero
  const Eigen::Vector2d rates = tilt_rates(est, s.gyro);
  CHECK(std::abs(rates[0]) <= 5e-3);
  CHECK(std::abs(rates[1]) <= 5e-3);
}

TEST_CASE("quaternion norm is pinned over a million updates") {
  MahonyGains g{1.0, 0.1};
  AttitudeEstimate est;
  ImuSample s = exact_sample(0.2, -0.1, 0.3, 0.4);
  for (int k = 0; k < 1000000; ++k) est = mahony_update(est, s, g, 0.001);
  CHECK(std::abs(est.q.norm() - 1.0) <= 1e-9);
}

TEST_CASE("zero-norm accel falls back to gyro-only propagation") {
  MahonyGains g{1.0, 0.1};
  AttitudeEstimate est;
  ImuSample s;
  s.accel.setZero();
  s.gyro = Eigen::Vector3d(0.0, 1.0, 0.0);  // pure pitch rate
  for (int k = 0; k < 100; ++k) est = mahony_update(est, s, g, 0.01);
  CHECK(std::isfinite(est.phi_hat));
  CHECK(est.psi_hat == doctest::Approx(1.0).epsilon(1e-3));  // integrated 1 rad/s for 1 s
  CHECK(est.integral.norm() == 0.0);  // no correction without a reference
}

TEST_CASE("sensor noise matches the requested variance") {
  NoiseSpec n;
  n.gyro_sigma = 0.02;
  n.accel_sigma = 0.15;
  PlantState x;
  std::mt19937_64 rng(77);
  const int N = 100000;
  double sum_g = 0.0, sq_g = 0.0, sum_a = 0.0, sq_a = 0.0;
  for (int k = 0; k < N; ++k) {
    const ImuSample s = imu_sense(x, n, rng, 0.0);
    sum_g += s.gyro.x();
    sq_g += s.gyro.x() * s.gyro.x();
    sum_a += s.accel.x();
    sq_a += s.accel.x() * s.accel.x();
  }
  const double sd_g = std::sqrt(sq_g / N - (sum_g / N) * (sum_g / N));
  const double sd_a = std::sqrt(sq_a / N - (sum_a / N) * (sum_a / N));
  CHECK(std::abs(sd_g - n.gyro_sigma) <= 0.03 * n.gyro_sigma);
  CHECK(std::abs(sd_a - n.accel_sigma) <= 0.03 * n.accel_sigma);
  CHECK(std::abs(sum_g / N) <= 5.0 * n.gyro_sigma / std::sqrt(double(N)));
}

TEST_CASE("same seed reproduces the exact sample stream") {
  NoiseSpec n;
  n.gyro_sigma = 0.01;
  n.accel_sigma = 0.05;
  PlantState x;
  x.phi = 0.2;
  std::mt19937_64 a(42), b(42);
  for (int k = 0; k < 50; ++k) {
    const ImuSample sa = imu_sense(x, n, a, k * 0.01);
    const ImuSample sb = imu_sense(x, n, b, k * 0.01);
    CHECK(sa.gyro == sb.gyro);
    CHECK(sa.accel == sb.accel);
  }
}

TEST_CASE("constant wheel speed yields the exact pulse interval") {
  EncoderStream enc;  // 16 pulses per revolution
  const double w = 4.7;
  const double spacing = 2.0 * M_PI / 16.0;
  // dt deliberately unaligned with the pulse grid
  for (int k = 0; k < 1000; ++k) enc = encoder_sense(enc, {w, -w, 0.0}, 0.00173);
  CHECK(enc.inter_pulse[0] == doctest::Approx(spacing / w).epsilon(1e-12));
  CHECK(enc.inter_pulse[1] == doctest::Approx(spacing / w).epsilon(1e-12));
  CHECK(enc.pulse_count[2] == 0);  // stationary wheel never pulses

  const auto v0 = encoder_velocity(enc, 0, 0.065);
  const auto v1 = encoder_velocity(enc, 1, 0.065);
  REQUIRE(v0.has_value());
  REQUIRE(v1.has_value());
  CHECK(*v0 == doctest::Approx(w * 0.065).epsilon(1e-12));
  CHECK(*v1 == doctest::Approx(-w * 0.065).epsilon(1e-12));
  CHECK_FALSE(encoder_velocity(enc, 2, 0.065).has_value());
}

TEST_CASE("no estimate before the second pulse") {
  EncoderStream enc;
  const double w = 1.0;  // one pulse every 0.3927 s
  for (int k = 0; k < 50; ++k) enc = encoder_sense(enc, {w, w, w}, 0.01);  // 0.5 s: 1 pulse
  CHECK(enc.pulse_count[0] == 1);
  CHECK_FALSE(encoder_velocity(enc, 0, 0.065).has_value());
  CHECK(encoder_wheel_speed(enc, 0) == 0.0);
  for (int k = 0; k < 50; ++k) enc = encoder_sense(enc, {w, w, w}, 0.01);  // second pulse lands
  CHECK(enc.pulse_count[0] == 2);
  CHECK(encoder_velocity(enc, 0, 0.065).has_value());
}

TEST_CASE("stale stream decays instead of holding the last speed") {
  EncoderStream enc;
  for (int k = 0; k < 500; ++k) enc = encoder_sense(enc, {5.0, 5.0, 5.0}, 0.001);
  const double fresh = encoder_wheel_speed(enc, 0);
  CHECK(fresh == doctest::Approx(5.0).epsilon(1e-9));
  // wheel stops: no more pulses, the estimate must shrink as time passes
  double prev = fresh;
  for (int k = 0; k < 400; ++k) {
    enc = encoder_sense(enc, {0.0, 0.0, 0.0}, 0.001);
    const double est = encoder_wheel_speed(enc, 0);
    CHECK(est <= prev + 1e-12);
    prev = est;
  }
  CHECK(prev < 1.0);
}

TEST_CASE("pulse counts track direction reversals") {
  EncoderStream enc;
  for (int k = 0; k < 100; ++k) enc = encoder_sense(enc, {6.0, 6.0, 6.0}, 0.001);
  const long forward = enc.pulse_count[0];
  CHECK(forward > 0);
  CHECK(enc.direction[0] == 1);
  for (int k = 0; k < 200; ++k) enc = encoder_sense(enc, {-6.0, -6.0, -6.0}, 0.001);
  CHECK(enc.pulse_count[0] > forward);
  CHECK(enc.direction[0] == -1);
  CHECK(encoder_wheel_speed(enc, 0) < 0.0);
}

TEST_CASE("moving median rejects spikes and passes through at window 1") {
  MedianWindow m(5);
  m.push(1.0);
  m.push(1.1);
  m.push(0.9);
  CHECK(m.push(50.0) != 50.0);           // spike swallowed
  CHECK(m.push(1.05) == doctest::Approx(1.05).epsilon(1e-15));
  MedianWindow pass(1);
  CHECK(pass.push(3.0) == 3.0);
  CHECK(pass.push(-7.0) == -7.0);
  MedianWindow m3(3);
  m3.push(2.0);
  m3.push(8.0);
  CHECK(m3.push(4.0) == 4.0);  // median of {2, 8, 4}
}
