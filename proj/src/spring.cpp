#include "pipebot/spring.hpp"

#include <algorithm>
#include <cmath>

#include "pipebot/rootfind.hpp"

namespace pipebot {

namespace {
constexpr double kThetaMax = M_PI / 2 - 1e-6;   // solve bracket upper end
constexpr double kThetaExcluded = 1e-4;         // G(theta) singular below this
}  // namespace

double beta_of_theta(double theta, const RobotGeometry& g) {
  return -theta + std::asin((g.pivot_offset_t / g.arm_length_a) * std::cos(theta)) + M_PI / 2;
}

ArmConfiguration arm_configuration(double theta, const RobotGeometry& g) {
  ArmConfiguration c;
  c.theta = theta;
  c.beta = beta_of_theta(theta, g);
  c.chi = g.pivot_offset_t * std::cos(theta);
  return c;
}

double solve_theta(double pipe_radius_H, const RobotGeometry& g) {
  if (!(pipe_radius_H > 0))
    throw GeometryError("pipe radius must be positive");
  if (pipe_radius_H > g.contact_arm_L)
    throw GeometryError("pipe radius outside arm reach (H > contact arm length)");
  const double beta_target = std::asin(pipe_radius_H / g.contact_arm_L);
  auto f = [&](double th) { return beta_of_theta(th, g) - beta_target; };
  // beta is strictly decreasing, beta(0) = pi/2 + asin(t/a) >= any asin target,
  // beta(pi/2-) -> 0+, so [0, pi/2) brackets every feasible radius.
  RootResult r;
  try {
    r = find_root(f, 0.0, kThetaMax, 1e-12);
  } catch (const RootError&) {
    throw GeometryError("pipe radius outside arm reach (no fold angle in [0, pi/2))");
  }
  if (std::abs(r.residual) > 1e-10)
    throw GeometryError("fold-angle solve did not meet the 1e-10 residual bound");
  return r.x;
}

double spring_force(double theta, const RobotGeometry& g, const FrictionModel& f,
                    double traction_fs, double gravity) {
  const double a = g.arm_length_a;
  const double t = g.pivot_offset_t;
  const double mg = g.robot_mass_m * gravity;
  const double H = g.contact_arm_L * std::sin(beta_of_theta(theta, g));
  const double lever = a * std::cos(theta + std::asin((t / a) * std::cos(theta)));
  return ((f.normal_force_FN - mg) * lever - traction_fs * H) / (t * std::cos(theta));
}

double spring_extension(double theta, const RobotGeometry& g) {
  const double a = g.arm_length_a;
  const double t = g.pivot_offset_t;
  const double beta = beta_of_theta(theta, g);
  const double anchor = std::hypot(t + a * std::cos(beta), a * std::sin(beta));
  return anchor * (1.0 - std::cos(theta));
}

std::vector<double> uniform_H_grid(const RobotGeometry& g, int n) {
  if (n < 2) throw GeometryError("stiffness grid needs at least two points");
  std::vector<double> grid(n);
  const double lo = g.pipe_radius_min_H;
  const double hi = g.pipe_radius_max_H;
  for (int i = 0; i < n; ++i) grid[i] = lo + (hi - lo) * i / (n - 1);
  return grid;
}

StiffnessResult stiffness_curve(const RobotGeometry& g, const FrictionModel& f,
                                double traction_fs, std::span<const double> H_grid,
                                double gravity) {
  StiffnessResult out;
  out.curve.reserve(H_grid.size());
  bool have_max = false;
  for (double H : H_grid) {
    StiffnessSample s;
    s.pipe_radius_H = H;
    s.theta = solve_theta(H, g);
    s.required_G = spring_force(s.theta, g, f, traction_fs, gravity) /
                   spring_extension(s.theta, g);
    out.curve.push_back(s);
    if (s.theta < kThetaExcluded) continue;  // singular end, not a design point
    // Strict > keeps the smallest H on ties (grid is sorted ascending).
    if (!have_max || s.required_G > out.K_required) {
      have_max = true;
      out.K_required = s.required_G;
      out.theta_at_max = s.theta;
      out.H_at_max = H;
    }
  }
  if (!have_max) throw GeometryError("no usable sample in stiffness sweep");
  return out;
}

bool check_pure_rolling(double traction, const FrictionModel& f) {
  return std::abs(traction) <= f.mu_s * f.normal_force_FN;
}

}  // namespace pipebot
