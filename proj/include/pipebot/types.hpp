#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pipebot {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arm/wheel geometry. a, t come from the mechanism drawings; L, R and the
// robot mass are not published anywhere, so the shipped defaults are assumed
// fixtures (see config comments).
struct RobotGeometry {
  double arm_length_a = 0.103;      // pivot-to-wheel arm [m]
  double pivot_offset_t = 0.036;    // pivot offset from body axis [m]
  double contact_arm_L = 0.30;      // effective pivot-to-contact length [m], assumed
  double wheel_radius_R = 0.065;    // [m], assumed
  double robot_mass_m = 4.0;        // [kg], assumed
  double pipe_radius_min_H = 4.5 * 0.0254;  // [m]
  double pipe_radius_max_H = 11.0 * 0.0254; // [m]

  void validate() const;
};

struct MotorParams {
  double terminal_resistance_Rm = 8.5;    // [ohm], assumed
  double terminal_inductance_Lm = 0.0425; // [H], assumed (tau_e = 5 ms)
  double back_emf_Kv = 0.009;             // [V.s/rad], assumed; see config note
  double gear_ratio_n = 26.0;             // gearhead reduction
  double load_inertia_Il = 2.0e-4;        // wheel+output shaft [kg.m^2], assumed
  double rotor_inertia_IR = 4.0e-7;       // motor rotor [kg.m^2], assumed
  double nominal_voltage_Vn = 12.0;       // [V]
  double rated_power_P = 20.0;            // [W], back-derived fixture
  double voltage_limit = 12.0;            // command clamp [V]

  void validate() const;
};

struct FrictionModel {
  double mu_s = 0.8;             // static friction coefficient
  double normal_force_FN = 7.5;  // per-wheel normal force [N]
  double wheel_traction_fs = 6.0;// design per-wheel traction [N]

  void validate() const;
};

struct BatteryCurvePoint {
  double current_A = 0.0;
  double usable_fraction = 1.0;  // in (0, 1]
};

struct BatteryModel {
  double capacity_Ah = 15.0;
  double nominal_voltage = 12.0;
  // Usable-fraction-vs-current samples; empty or single point = flat curve.
  std::vector<BatteryCurvePoint> discharge_curve;

  // Piecewise-linear interpolation, clamped at the ends.
  double usable_fraction(double current_A) const;
  void validate() const;
};

struct DragModel {
  // F_d = c * |v_rel| * v_rel, calibrated so 1.2 m/s relative flow gives 18 N.
  double coefficient_c = 12.5;  // [N.s^2/m^2]

  void validate() const;
};

// Rigid-body coefficients of the simulated vehicle. The published work never
// states its dynamic model, so this block is entirely an assumed fixture; the
// frame convention is roll about the pipe axis (phi), then pitch (psi),
// attitude R_x(phi)*R_y(psi).
struct BodyParams {
  double tilt_inertia_roll = 0.02;    // I_phi [kg.m^2]
  double tilt_inertia_pitch = 0.04;   // I_psi [kg.m^2]
  double com_offset_axial = 0.008;    // d_x [m], ahead of the support centre
  double com_offset_lateral = 0.004;  // d_y [m]
  double com_offset_vertical = 0.015; // d_z [m], above centre => overturning
  double damping_roll = 0.05;         // [N.m.s/rad]
  double damping_pitch = 0.08;        // [N.m.s/rad]
  double damping_axial = 1.0;         // [N.s/m]
  double roll_coupling_rho = 0.35;    // dimensionless traction->roll lever scale
  double gravity = 9.80665;           // [m/s^2]

  void validate() const;
};

struct PidGains {
  double kp = 0.8;
  double ki = 0.8;
  double kd = 0.0;
};

struct ControlParams {
  std::array<double, 4> lqr_q_diag = {10.0, 1.0, 10.0, 1.0};
  double lqr_r_diag = 0.1;
  PidGains pid;
  double control_period = 0.01;     // [s]
  int velocity_median_window = 5;   // odd; 1 disables smoothing
  double velocity_envelope = 0.5;   // max |V_d| [m/s] for the trajectory clamp

  void validate() const;
};

struct EstimationParams {
  double mahony_kp = 1.0;
  double mahony_ki = 0.1;
  int encoder_pulses_per_rev = 16;  // assumed fixture
  bool attitude_init_from_accel = true;

  void validate() const;
};

struct NoiseSpec {
  double gyro_sigma = 0.0;        // [rad/s], per axis, Gaussian
  double accel_sigma = 0.0;       // [m/s^2], per axis, Gaussian
  std::array<double, 3> gyro_bias = {0.0, 0.0, 0.0};  // [rad/s]
};

struct VelocityProfileStep {
  double t_start = 0.0;   // [s]
  double v_target = 0.0;  // [m/s]
};

struct SimScenario {
  std::string name = "default";
  double duration = 10.0;       // [s]
  double plant_dt = 0.001;      // [s]
  double pipe_radius_H = 7.0 * 0.0254;  // [m]; 14-inch pipe
  double initial_phi = 0.0;     // [rad]
  double initial_psi = 0.0;     // [rad]
  double flow_velocity = 0.0;   // [m/s], +x along the pipe
  std::vector<VelocityProfileStep> velocity_profile = {{0.0, 0.1}};
  NoiseSpec noise;
  std::uint64_t seed = 1;

  // Desired velocity at time t (piecewise constant, last step wins).
  double desired_velocity(double t) const;
  void validate() const;
};

struct Config {
  RobotGeometry geometry;
  MotorParams motor;
  FrictionModel friction;
  BatteryModel battery;
  DragModel drag;
  BodyParams body;
  ControlParams control;
  EstimationParams estimation;
  SimScenario scenario;

  void validate() const;
};

}  // namespace pipebot
