#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "pipebot/config.hpp"
#include "pipebot/motor.hpp"
#include "pipebot/plant.hpp"

using namespace pipebot;

namespace {

Environment fixture_env() { return make_environment(default_config()); }

double total_energy(const PlantState& x, const Environment& env) {
  return kinetic_energy(x, env) + potential_energy(x, env);
}

// Test-local Jacobian oracle: central differences at two step sizes combined
// by Richardson extrapolation (error falls from h^2 to h^4), deliberately
// using different steps than the library.
Eigen::Matrix4d richardson_A2(const Environment& env, const Eigen::Vector3d& u0) {
  auto diff = [&](double h) {
    Eigen::Matrix4d D;
    for (int j = 0; j < 4; ++j) {
      Eigen::Vector4d xp = Eigen::Vector4d::Zero(), xm = Eigen::Vector4d::Zero();
      xp[j] += h;
      xm[j] -= h;
      D.col(j) = (f2(xp, u0, env) - f2(xm, u0, env)) / (2 * h);
    }
    return D;
  };
  const double h = 1e-4;
  return (4.0 * diff(h / 2) - diff(h)) / 3.0;
}

Eigen::Matrix<double, 4, 3> richardson_B2(const Environment& env,
                                          const Eigen::Vector3d& u0) {
  auto diff = [&](double h) {
    Eigen::Matrix<double, 4, 3> D;
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d up = u0, um = u0;
      up[j] += h;
      um[j] -= h;
      D.col(j) = (f2(Eigen::Vector4d::Zero(), up, env) -
                  f2(Eigen::Vector4d::Zero(), um, env)) /
                 (2 * h);
    }
    return D;
  };
  const double h = 1e-4;
  return (4.0 * diff(h / 2) - diff(h)) / 3.0;
}

}  // namespace

TEST_CASE("drag calibration points") {
  DragModel d;
  CHECK(std::abs(drag_force(d, 0.0, 1.2) - 18.0) <= 1e-9);
  CHECK(std::abs(drag_force(d, 0.0, 0.6) - 4.5) <= 1e-9);
  // sign conventions: swimming against the flow increases the brake
  CHECK(drag_force(d, 0.6, 0.0) == doctest::Approx(-4.5).epsilon(1e-12));
  CHECK(drag_force(d, 0.3, -0.3) == doctest::Approx(-4.5).epsilon(1e-12));
  CHECK(drag_force(d, 0.0, 0.0) == 0.0);
}

TEST_CASE("contact jacobian carries the 120-degree stations") {
  Environment env = fixture_env();
  const auto J = contact_jacobian(env);
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  const double s3 = std::sqrt(3.0) / 2.0;
  CHECK(J(0, 0) == 1.0);
  CHECK(J(0, 1) == doctest::Approx(0.0).epsilon(1e-15));       // top wheel: no roll lever
  CHECK(J(0, 2) == doctest::Approx(H).epsilon(1e-15));
  CHECK(J(1, 1) == doctest::Approx(-rho * H * s3).epsilon(1e-12));
  CHECK(J(2, 1) == doctest::Approx(rho * H * s3).epsilon(1e-12));
  CHECK(J(1, 2) == doctest::Approx(-0.5 * H).epsilon(1e-12));
  CHECK(J(2, 2) == doctest::Approx(-0.5 * H).epsilon(1e-12));
  // rolling speeds are J q_dot / R
  const auto w = rolling_wheel_speeds(0.2, 0.1, -0.3, env);
  const Eigen::Vector3d expect = J * Eigen::Vector3d(0.2, 0.1, -0.3) / env.geom.wheel_radius_R;
  for (int i = 0; i < 3; ++i) CHECK(w[i] == doctest::Approx(expect[i]).epsilon(1e-14));
}

TEST_CASE("upright rest is not an equilibrium: gravity bias tips the body") {
  Environment env = fixture_env();
  const Eigen::Vector4d d = f2(Eigen::Vector4d::Zero(), Eigen::Vector3d::Zero(), env);
  CHECK(d[1] < 0.0);  // lateral mass offset pulls roll negative
  CHECK(d[3] > 0.0);  // axial mass offset pitches forward
}

TEST_CASE("trim torques cancel gravity exactly and carry no net thrust") {
  Environment env = fixture_env();
  const Eigen::Vector3d u0 = solve_trim(env);
  const Eigen::Vector4d d = f2(Eigen::Vector4d::Zero(), u0, env);
  CHECK(d.norm() <= 1e-10);
  // minimum-norm solution is orthogonal to the thrust direction (1,1,1)
  CHECK(std::abs(u0.sum()) <= 1e-10);
}

TEST_CASE("linearization matches the Richardson oracle") {
  Environment env = fixture_env();
  const LinearizedSystem sys = linearize(env);
  const Eigen::Matrix4d A_ref = richardson_A2(env, sys.trim_input_u0);
  const Eigen::Matrix<double, 4, 3> B_ref = richardson_B2(env, sys.trim_input_u0);
  CHECK((sys.A2 - A_ref).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, A_ref.norm()));
  CHECK((sys.B2 - B_ref).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, B_ref.norm()));
  // fixed output map
  CHECK(sys.C2(0, 1) == 1.0);
  CHECK(sys.C2(1, 2) == 1.0);
  CHECK(sys.C2.cwiseAbs().sum() == 2.0);
  CHECK(sys.D2.cwiseAbs().sum() == 0.0);
}

TEST_CASE("linearization diagonal blocks match the closed forms") {
  Environment env = fixture_env();
  const LinearizedSystem sys = linearize(env);
  const double R = env.geom.wheel_radius_R;
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  const double iw = (env.motor.load_inertia_Il +
                     env.motor.gear_ratio_n * env.motor.gear_ratio_n * env.motor.rotor_inertia_IR) /
                    (R * R);
  const double I_roll = env.body.tilt_inertia_roll + 1.5 * iw * rho * rho * H * H;
  const double I_pitch = env.body.tilt_inertia_pitch + 1.5 * iw * H * H;
  const double mgdz = env.geom.robot_mass_m * env.body.gravity * env.body.com_offset_vertical;
  // overturning stiffness mg*d_z over the effective inertia, viscous damping
  CHECK(sys.A2(1, 0) == doctest::Approx(mgdz / I_roll).epsilon(1e-7));
  CHECK(sys.A2(1, 1) == doctest::Approx(-env.body.damping_roll / I_roll).epsilon(1e-7));
  CHECK(sys.A2(3, 2) == doctest::Approx(mgdz / I_pitch).epsilon(1e-7));
  CHECK(sys.A2(3, 3) == doctest::Approx(-env.body.damping_pitch / I_pitch).epsilon(1e-7));
  CHECK(sys.A2(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sys.A2(2, 3) == doctest::Approx(1.0).epsilon(1e-9));
  // torque to pitch acceleration through the traction lever: column sums
  CHECK(sys.B2(3, 0) == doctest::Approx(H / R / I_pitch).epsilon(1e-7));
  CHECK(sys.B2(1, 0) == doctest::Approx(0.0).epsilon(1e-9));  // top wheel has no roll lever
}

TEST_CASE("frictionless undriven motion conserves energy") {
  Environment env = fixture_env();
  env.body.damping_roll = env.body.damping_pitch = env.body.damping_axial = 0.0;
  env.drag.coefficient_c = 0.0;
  // zero back-EMF constant cuts the electrical coupling entirely (zero coil
  // voltage alone would still brake through the induced currents)
  env.motor.back_emf_Kv = 0.0;
  PlantState x;
  x.phi = 0.12;
  x.psi = -0.2;
  const double E0 = total_energy(x, env);
  bool slipped = false;
  for (int k = 0; k < 800; ++k) {
    const StepResult r = step(x, Eigen::Vector3d::Zero(), env, 0.001);
    x = r.state;
    slipped = slipped || r.slip;
    CHECK(std::abs(total_energy(x, env) - E0) <= 1e-8 * std::abs(E0));
  }
  CHECK_FALSE(slipped);
}

TEST_CASE("back-EMF braking alone dissipates energy") {
  // complement of the conservative case: coupling on, everything else off
  Environment env = fixture_env();
  env.body.damping_roll = env.body.damping_pitch = env.body.damping_axial = 0.0;
  env.drag.coefficient_c = 0.0;
  PlantState x;
  x.v = 0.5;
  double e_prev = total_energy(x, env);
  for (int k = 0; k < 300; ++k) {
    x = step(x, Eigen::Vector3d::Zero(), env, 0.001).state;
    const double e = total_energy(x, env);
    CHECK(e <= e_prev + 1e-12);
    e_prev = e;
  }
  CHECK(x.v < 0.5);
}

TEST_CASE("passive damped motion dissipates monotonically") {
  Environment env = fixture_env();
  PlantState x;
  x.phi = 0.3;
  x.psi = -0.25;
  x.phi_dot = 0.4;
  double e_prev = total_energy(x, env);
  for (int k = 0; k < 1500; ++k) {
    x.motor_currents = {0.0, 0.0, 0.0};
    x = step(x, Eigen::Vector3d::Zero(), env, 0.001).state;
    const double e = total_energy(x, env);
    CHECK(e <= e_prev + 1e-9);
    e_prev = e;
  }
}

TEST_CASE("slip flag is consistent with the traction bound") {
  Environment env = fixture_env();
  const double limit = env.fric.mu_s * env.fric.normal_force_FN;
  std::mt19937_64 rng(99);
  // torque span brackets the 6 N traction bound: 0.39 N.m of wheel torque
  // demands exactly the limit, so +/-0.8 exercises both branches
  std::uniform_real_distribution<double> angle(-0.5, 0.5);
  std::uniform_real_distribution<double> rate(-1.0, 1.0);
  std::uniform_real_distribution<double> torque(-0.8, 0.8);
  int slips = 0, rolls = 0;
  for (int trial = 0; trial < 500; ++trial) {
    PlantState x;
    x.phi = angle(rng);
    x.psi = angle(rng);
    x.phi_dot = rate(rng);
    x.psi_dot = rate(rng);
    x.v = 0.3 * rate(rng);
    const Eigen::Vector3d u(torque(rng), torque(rng), torque(rng));
    const PlantDerivative d = plant_derivative(x, u, env);
    double worst = 0.0;
    for (double f : d.traction) worst = std::max(worst, std::abs(f));
    if (d.slip) {
      ++slips;
      CHECK(worst == doctest::Approx(limit).epsilon(1e-12));  // clamped exactly
    } else {
      ++rolls;
      CHECK(worst <= limit + 1e-12);
    }
  }
  // the sweep must genuinely exercise both branches
  CHECK(slips > 20);
  CHECK(rolls > 20);
}

TEST_CASE("stepped wheel speeds stay rolling-consistent") {
  Environment env = fixture_env();
  PlantState x;
  x.phi = -0.1;
  x.psi = 0.07;
  for (int k = 0; k < 50; ++k) {
    x = step(x, Eigen::Vector3d(3.0, 1.0, 2.0), env, 0.001).state;
    const auto w = rolling_wheel_speeds(x.v, x.phi_dot, x.psi_dot, env);
    for (int i = 0; i < 3; ++i)
      CHECK(x.wheel_speeds[i] == doctest::Approx(w[i]).epsilon(1e-12));
  }
}

TEST_CASE("zero gravity, zero input: the origin is stationary") {
  Environment env = fixture_env();
  env.body.gravity = 0.0;
  env.flow_velocity = 0.0;
  PlantState x;
  const StepResult r = step(x, Eigen::Vector3d::Zero(), env, 0.001);
  CHECK(r.state.v == 0.0);
  CHECK(r.state.phi == 0.0);
  CHECK(r.state.psi == 0.0);
  CHECK(r.state.motor_currents[0] == 0.0);
  CHECK_FALSE(r.slip);
}

TEST_CASE("electrical step against the locked-rotor RC closed form") {
  MotorParams m;
  const double tau = m.terminal_inductance_Lm / m.terminal_resistance_Rm;
  const double V = 12.0;
  double i = 0.0;
  const double dt = tau / 100.0;
  for (int k = 1; k <= 100; ++k) {
    i = motor_step(i, 0.0, V, m, dt).current;
    const double exact = V / m.terminal_resistance_Rm * (1.0 - std::exp(-k * dt / tau));
    CHECK(std::abs(i - exact) <= 1e-9 * std::abs(exact));
  }
  // torque map and its static inverse agree
  const MotorStep s = motor_step(0.5, 2.0, 6.0, m, dt);
  CHECK(s.output_torque == doctest::Approx(m.gear_ratio_n * m.back_emf_Kv * s.current).epsilon(1e-14));
  const double v = voltage_for_torque(0.1, 3.0, m);
  CHECK(v == doctest::Approx(m.terminal_resistance_Rm * 0.1 / (m.gear_ratio_n * m.back_emf_Kv) +
                             m.back_emf_Kv * m.gear_ratio_n * 3.0)
                 .epsilon(1e-14));
}

TEST_CASE("divergence raises with the last finite state attached") {
  Environment env = fixture_env();
  env.body.damping_axial = -40.0;  // negative damping pumps energy in
  env.drag.coefficient_c = 0.0;
  PlantState x;
  x.v = 1.0;
  bool caught = false;
  double t = 0.0;
  try {
    for (int k = 0; k < 20000; ++k) {
      x = step(x, Eigen::Vector3d::Zero(), env, 0.001, t).state;
      t += 0.001;
    }
  } catch (const DivergenceError& e) {
    caught = true;
    CHECK(std::isfinite(e.last_state.v));
    CHECK(e.last_state.v > 1.0);
    CHECK(e.time > 0.0);
    CHECK(e.time <= t + 0.001);
  }
  CHECK(caught);
}

TEST_CASE("step rejects out-of-range dt") {
  Environment env = fixture_env();
  PlantState x;
  CHECK_THROWS_AS(step(x, Eigen::Vector3d::Zero(), env, 0.02), ValidationError);
  CHECK_THROWS_AS(step(x, Eigen::Vector3d::Zero(), env, 0.0), ValidationError);
  CHECK_THROWS_AS(step(x, Eigen::Vector3d::Zero(), env, -0.001), ValidationError);
}
