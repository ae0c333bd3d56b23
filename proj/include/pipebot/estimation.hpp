#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <optional>
#include <random>

#include "pipebot/plant.hpp"
#include "pipebot/types.hpp"

namespace pipebot {

struct ImuSample {
  Eigen::Vector3d gyro;   // body rates [rad/s]
  Eigen::Vector3d accel;  // gravity vector in body axes [m/s^2]; level -> (0,0,-g)
  double t = 0.0;
};

// Samples the IMU from the true state. Gyro = body angular velocity of
// R_x(phi)R_y(psi) plus bias plus white noise; accel = body-frame gravity
// plus white noise. Draw order (gyro xyz, then accel xyz) is fixed so a
// seeded run is reproducible.
ImuSample imu_sense(const PlantState& x, const NoiseSpec& noise, std::mt19937_64& rng,
                    double t, double gravity = 9.80665);

struct MahonyGains {
  double kp = 1.0;
  double ki = 0.1;
};

struct AttitudeEstimate {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();  // body-to-world
  Eigen::Vector3d integral = Eigen::Vector3d::Zero();     // ki path (= -bias estimate)
  double phi_hat = 0.0;
  double psi_hat = 0.0;
};

// One explicit-complementary-filter update (Mahony et al., IEEE TAC 2008):
// error = measured x estimated gravity direction, proportional+integral
// correction on the gyro, quaternion integrated and renormalised. A zero-norm
// accel sample skips the correction (gyro-only propagation).
AttitudeEstimate mahony_update(const AttitudeEstimate& est, const ImuSample& s,
                               const MahonyGains& g, double dt);

// Tilt alignment from a single accel sample (used to seed the estimate).
AttitudeEstimate attitude_from_accel(const Eigen::Vector3d& accel);

// Bias-corrected tilt rates (phi_dot, psi_dot) from a gyro sample.
Eigen::Vector2d tilt_rates(const AttitudeEstimate& est, const Eigen::Vector3d& gyro);

struct EncoderStream {
  int pulses_per_rev = 16;
  double t = 0.0;  // stream clock [s]
  std::array<double, 3> angle{};         // accumulated wheel angle [rad]
  std::array<double, 3> last_pulse_t{};  // latest crossing time
  std::array<double, 3> inter_pulse{};   // latest T_c [s]; 0 until two pulses
  std::array<int, 3> direction{};        // sign of motion at the last crossing
  std::array<long, 3> pulse_count{};
};

// Advances the stream by dt with wheel speeds held constant (ZOH over a plant
// substep). Pulse crossing times are interpolated inside the step, so a
// constant-speed wheel yields T_c = 2*pi/(N*|omega|) exactly.
EncoderStream encoder_sense(const EncoderStream& stream,
                            const std::array<double, 3>& wheel_speeds, double dt);

// Rim-velocity estimate v = 2*pi*R/(N*T_c), signed by the last motion
// direction; empty until two pulses have been seen on that wheel.
std::optional<double> encoder_velocity(const EncoderStream& stream, int wheel,
                                       double wheel_radius);

// Wheel-speed estimate [rad/s] for the control loop. Falls back to the time
// since the last pulse when that exceeds T_c, so a stopping wheel decays
// toward zero instead of holding its last estimate.
double encoder_wheel_speed(const EncoderStream& stream, int wheel);

// Fixed-width moving median (window odd; 1 = pass-through).
class MedianWindow {
 public:
  explicit MedianWindow(int window = 5) : window_(window) {}
  double push(double x);
  void reset();

 private:
  int window_;
  std::vector<double> buf_;
};

}  // namespace pipebot
