#include "pipebot/plant.hpp"

#include <cmath>

namespace pipebot {

namespace {

// Wheel contact stations around the bore: 90, 210, 330 deg.
constexpr double kCos[3] = {0.0, -0.8660254037844386467637232, 0.8660254037844386467637232};
constexpr double kSin[3] = {1.0, -0.5, -0.5};

struct Mech {
  Eigen::Vector3d qdd;            // (v_dot, phi_ddot, psi_ddot)
  std::array<double, 3> traction; // contact force actually transmitted
  bool slip;
};

// Reflected wheel+rotor inertia at the wheel shaft.
double wheel_inertia(const MotorParams& m) {
  return m.load_inertia_Il + m.gear_ratio_n * m.gear_ratio_n * m.rotor_inertia_IR;
}

Eigen::Vector3d mass_diagonal(const Environment& env) {
  const double R = env.geom.wheel_radius_R;
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  const double iw = wheel_inertia(env.motor) / (R * R);
  // Sum of squared Jacobian rows is diagonal by the 120-deg symmetry.
  return {env.geom.robot_mass_m + 3.0 * iw,
          env.body.tilt_inertia_roll + iw * rho * rho * H * H * 1.5,
          env.body.tilt_inertia_pitch + iw * H * H * 1.5};
}

// Gravity generalized torques, exactly -dPE/dq for
// z_cm = d_y sin(phi) + (d_z cos(psi) - d_x sin(psi)) cos(phi).
void gravity_torques(const Environment& env, double phi, double psi,
                     double* tau_phi, double* tau_psi) {
  const auto& b = env.body;
  const double mg = env.geom.robot_mass_m * b.gravity;
  const double r = b.com_offset_vertical * std::cos(psi) - b.com_offset_axial * std::sin(psi);
  *tau_phi = -mg * (b.com_offset_lateral * std::cos(phi) - r * std::sin(phi));
  *tau_psi = mg * (b.com_offset_vertical * std::sin(psi) + b.com_offset_axial * std::cos(psi)) *
             std::cos(phi);
}

Mech mechanics(const Environment& env, double v, double phi, double phi_dot,
               double psi, double psi_dot, const Eigen::Vector3d& torques) {
  const double R = env.geom.wheel_radius_R;
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  const double iw = wheel_inertia(env.motor) / (R * R);

  double tau_phi_g, tau_psi_g;
  gravity_torques(env, phi, psi, &tau_phi_g, &tau_psi_g);
  const double f_drag = drag_force(env.drag, v, env.flow_velocity);

  Eigen::Vector3d drive = torques / R;  // per-wheel drive force under rolling
  Eigen::Vector3d q_ext(f_drag - env.body.damping_axial * v,
                        tau_phi_g - env.body.damping_roll * phi_dot,
                        tau_psi_g - env.body.damping_pitch * psi_dot);

  auto generalize = [&](const Eigen::Vector3d& f) {
    Eigen::Vector3d q = q_ext;
    for (int i = 0; i < 3; ++i) {
      q[0] += f[i];
      q[1] += rho * H * kCos[i] * f[i];
      q[2] += H * kSin[i] * f[i];
    }
    return q;
  };

  Mech out;
  out.qdd = generalize(drive).cwiseQuotient(mass_diagonal(env));

  // Contact traction implied by rolling: wheel equation I_w*omega_dot = T - F*R.
  const double limit = env.fric.mu_s * env.fric.normal_force_FN;
  out.slip = false;
  Eigen::Vector3d used;
  for (int i = 0; i < 3; ++i) {
    double rim_acc = out.qdd[0] + rho * H * kCos[i] * out.qdd[1] + H * kSin[i] * out.qdd[2];
    double f = drive[i] - iw * rim_acc;
    out.traction[i] = f;
    used[i] = std::clamp(f, -limit, limit);
    if (std::abs(f) > limit) out.slip = true;
  }
  if (out.slip) {
    // Saturated traction drives the bare body; wheels are no longer
    // kinematically locked but their speeds are kept at the rolling values
    // (slip dynamics themselves are out of scope).
    Eigen::Vector3d m_body(env.geom.robot_mass_m, env.body.tilt_inertia_roll,
                           env.body.tilt_inertia_pitch);
    out.qdd = generalize(used).cwiseQuotient(m_body);
    for (int i = 0; i < 3; ++i) out.traction[i] = used[i];
  }
  return out;
}

}  // namespace

Environment make_environment(const Config& cfg) {
  Environment env;
  env.geom = cfg.geometry;
  env.fric = cfg.friction;
  env.body = cfg.body;
  env.motor = cfg.motor;
  env.drag = cfg.drag;
  env.flow_velocity = cfg.scenario.flow_velocity;
  env.pipe_radius_H = cfg.scenario.pipe_radius_H;
  return env;
}

double drag_force(const DragModel& d, double robot_velocity, double flow_velocity) {
  const double v_rel = flow_velocity - robot_velocity;
  return d.coefficient_c * std::abs(v_rel) * v_rel;
}

Eigen::Matrix<double, 3, 3> contact_jacobian(const Environment& env) {
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) J.row(i) << 1.0, rho * H * kCos[i], H * kSin[i];
  return J;
}

std::array<double, 3> rolling_wheel_speeds(double v, double phi_dot, double psi_dot,
                                           const Environment& env) {
  const double R = env.geom.wheel_radius_R;
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  std::array<double, 3> w;
  for (int i = 0; i < 3; ++i)
    w[i] = (v + rho * H * kCos[i] * phi_dot + H * kSin[i] * psi_dot) / R;
  return w;
}

PlantDerivative plant_derivative(const PlantState& x, const Eigen::Vector3d& u_torques,
                                 const Environment& env) {
  Mech m = mechanics(env, x.v, x.phi, x.phi_dot, x.psi, x.psi_dot, u_torques);
  PlantDerivative d;
  d.xdot.s = x.v;
  d.xdot.v = m.qdd[0];
  d.xdot.phi = x.phi_dot;
  d.xdot.phi_dot = m.qdd[1];
  d.xdot.psi = x.psi_dot;
  d.xdot.psi_dot = m.qdd[2];
  const double R = env.geom.wheel_radius_R;
  const double H = env.pipe_radius_H;
  const double rho = env.body.roll_coupling_rho;
  for (int i = 0; i < 3; ++i) {
    d.xdot.wheel_speeds[i] =
        (m.qdd[0] + rho * H * kCos[i] * m.qdd[1] + H * kSin[i] * m.qdd[2]) / R;
    d.xdot.motor_currents[i] = 0.0;
  }
  d.traction = m.traction;
  d.slip = m.slip;
  return d;
}

Eigen::Vector4d f2(const Eigen::Vector4d& x2, const Eigen::Vector3d& u,
                   const Environment& env) {
  Mech m = mechanics(env, 0.0, x2[0], x2[1], x2[2], x2[3], u);
  return {x2[1], m.qdd[1], x2[3], m.qdd[2]};
}

StepResult step(const PlantState& x, const Eigen::Vector3d& u_voltages,
                const Environment& env, double dt, double t_now) {
  if (!(dt > 0.0 && dt <= 0.01)) throw ValidationError("plant step dt must be in (0, 10 ms]");
  const auto& mp = env.motor;
  const double tau_e = mp.terminal_inductance_Lm / mp.terminal_resistance_Rm;
  const int substeps = (tau_e < 5.0 * dt) ? 10 : 1;
  const double h = dt / substeps;

  using Y = Eigen::Matrix<double, 9, 1>;
  Y y;
  y << x.s, x.v, x.phi, x.phi_dot, x.psi, x.psi_dot, x.motor_currents[0],
      x.motor_currents[1], x.motor_currents[2];

  bool slip = false;
  auto f = [&](const Y& yy) {
    Eigen::Vector3d i_m = yy.segment<3>(6);
    Eigen::Vector3d torques = mp.gear_ratio_n * mp.back_emf_Kv * i_m;
    Mech m = mechanics(env, yy[1], yy[2], yy[3], yy[4], yy[5], torques);
    slip = slip || m.slip;
    Y dy;
    dy << yy[1], m.qdd[0], yy[3], m.qdd[1], yy[5], m.qdd[2], 0, 0, 0;
    auto w = rolling_wheel_speeds(yy[1], yy[3], yy[5], env);
    for (int i = 0; i < 3; ++i) {
      double back_emf = mp.back_emf_Kv * mp.gear_ratio_n * w[i];
      dy[6 + i] = (u_voltages[i] - back_emf - mp.terminal_resistance_Rm * i_m[i]) /
                  mp.terminal_inductance_Lm;
    }
    return dy;
  };

  for (int k = 0; k < substeps; ++k) {
    Y k1 = f(y);
    Y k2 = f(y + 0.5 * h * k1);
    Y k3 = f(y + 0.5 * h * k2);
    Y k4 = f(y + h * k3);
    Y y_next = y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!y_next.allFinite() || y_next.cwiseAbs().maxCoeff() > 1e9) {
      PlantState last;
      last.s = y[0]; last.v = y[1]; last.phi = y[2]; last.phi_dot = y[3];
      last.psi = y[4]; last.psi_dot = y[5];
      last.wheel_speeds = rolling_wheel_speeds(y[1], y[3], y[5], env);
      for (int i = 0; i < 3; ++i) last.motor_currents[i] = y[6 + i];
      throw DivergenceError("plant state diverged", last, t_now + k * h);
    }
    y = y_next;
  }

  StepResult out;
  out.state.s = y[0];
  out.state.v = y[1];
  out.state.phi = y[2];
  out.state.phi_dot = y[3];
  out.state.psi = y[4];
  out.state.psi_dot = y[5];
  out.state.wheel_speeds = rolling_wheel_speeds(y[1], y[3], y[5], env);
  for (int i = 0; i < 3; ++i) out.state.motor_currents[i] = y[6 + i];
  // Final-state contact report (and its slip contribution).
  Eigen::Vector3d torques =
      mp.gear_ratio_n * mp.back_emf_Kv * Eigen::Vector3d(y[6], y[7], y[8]);
  Mech m = mechanics(env, y[1], y[2], y[3], y[4], y[5], torques);
  out.traction = m.traction;
  out.slip = slip || m.slip;
  return out;
}

double kinetic_energy(const PlantState& x, const Environment& env) {
  Eigen::Vector3d mdiag = mass_diagonal(env);
  return 0.5 * (mdiag[0] * x.v * x.v + mdiag[1] * x.phi_dot * x.phi_dot +
                mdiag[2] * x.psi_dot * x.psi_dot);
}

double potential_energy(const PlantState& x, const Environment& env) {
  const auto& b = env.body;
  const double z_cm =
      b.com_offset_lateral * std::sin(x.phi) +
      (b.com_offset_vertical * std::cos(x.psi) - b.com_offset_axial * std::sin(x.psi)) *
          std::cos(x.phi);
  return env.geom.robot_mass_m * b.gravity * z_cm;
}

Eigen::Vector3d solve_trim(const Environment& env) {
  auto g = [&](const Eigen::Vector3d& u) {
    Eigen::Vector4d d = f2(Eigen::Vector4d::Zero(), u, env);
    return Eigen::Vector2d(d[1], d[3]);
  };
  Eigen::Vector3d u = Eigen::Vector3d::Zero();  // equal torque split
  Eigen::Vector2d r = g(u);
  for (int it = 0; it < 50 && r.norm() > 1e-12; ++it) {
    Eigen::Matrix<double, 2, 3> J;
    for (int j = 0; j < 3; ++j) {
      double hj = 1e-6 * std::max(1.0, std::abs(u[j]));
      Eigen::Vector3d up = u, um = u;
      up[j] += hj;
      um[j] -= hj;
      J.col(j) = (g(up) - g(um)) / (2 * hj);
    }
    Eigen::Vector3d delta = J.completeOrthogonalDecomposition().solve(r);
    double alpha = 1.0;
    for (int back = 0; back < 12; ++back) {
      Eigen::Vector2d r_new = g(u - alpha * delta);
      if (r_new.norm() <= (1.0 - 1e-4 * alpha) * r.norm() || r.norm() == 0) {
        u -= alpha * delta;
        r = r_new;
        break;
      }
      alpha *= 0.5;
    }
  }
  if (r.norm() > 1e-10) throw ValidationError("trim solve did not converge");
  return u;
}

LinearizedSystem linearize(const Environment& env) {
  LinearizedSystem sys;
  sys.trim_input_u0 = solve_trim(env);
  const Eigen::Vector4d x0 = Eigen::Vector4d::Zero();
  for (int j = 0; j < 4; ++j) {
    double hj = 1e-6 * std::max(1.0, std::abs(x0[j]));
    Eigen::Vector4d xp = x0, xm = x0;
    xp[j] += hj;
    xm[j] -= hj;
    sys.A2.col(j) = (f2(xp, sys.trim_input_u0, env) - f2(xm, sys.trim_input_u0, env)) / (2 * hj);
  }
  for (int j = 0; j < 3; ++j) {
    double hj = 1e-6 * std::max(1.0, std::abs(sys.trim_input_u0[j]));
    Eigen::Vector3d up = sys.trim_input_u0, um = sys.trim_input_u0;
    up[j] += hj;
    um[j] -= hj;
    sys.B2.col(j) = (f2(x0, up, env) - f2(x0, um, env)) / (2 * hj);
  }
  sys.C2 << 0, 1, 0, 0,
            0, 0, 1, 0;
  sys.D2.setZero();
  return sys;
}

}  // namespace pipebot
