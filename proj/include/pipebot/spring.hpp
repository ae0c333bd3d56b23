#pragma once

#include <span>
#include <vector>

#include "pipebot/types.hpp"

namespace pipebot {

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Arm pose at fold angle theta. beta is the arm elevation, chi the spring
// lever; all angles in radians, 0 <= theta < pi/2.
struct ArmConfiguration {
  double theta = 0.0;
  double beta = 0.0;
  double chi = 0.0;  // t * cos(theta)
};

// beta(theta) = -theta + asin((t/a) cos(theta)) + pi/2. Strictly decreasing
// in theta, which is what makes the inverse well posed.
double beta_of_theta(double theta, const RobotGeometry& g);

ArmConfiguration arm_configuration(double theta, const RobotGeometry& g);

// Inverts beta(theta) = asin(H/L) for the arm fold angle at pipe radius H.
// Residual |beta(theta) - asin(H/L)| <= 1e-10. Throws GeometryError when H is
// outside the arm's reach (H > L or no root in [0, pi/2)).
double solve_theta(double pipe_radius_H, const RobotGeometry& g);

// Wheel-module force the spring must supply at fold angle theta so the wheel
// presses with F_N while transmitting traction f_s:
//   F = ((F_N - m g) a cos(theta + asin((t/a) cos(theta))) - f_s H) / (t cos(theta))
// with H recovered as L sin(beta(theta)).
double spring_force(double theta, const RobotGeometry& g, const FrictionModel& f,
                    double traction_fs, double gravity = 9.80665);

// Spring extension U(theta) = sqrt((t + a cos(beta))^2 + (a sin(beta))^2) * (1 - cos(theta)).
// The square root is the pivot-to-anchor distance; U(0) = 0.
double spring_extension(double theta, const RobotGeometry& g);

struct StiffnessSample {
  double pipe_radius_H = 0.0;
  double theta = 0.0;
  double required_G = 0.0;  // spring_force / spring_extension [N/m]
};

struct StiffnessResult {
  double K_required = 0.0;  // max of required_G over the sweep
  double theta_at_max = 0.0;
  double H_at_max = 0.0;
  std::vector<StiffnessSample> curve;
};

// Uniform pipe-radius grid over [pipe_radius_min_H, pipe_radius_max_H].
std::vector<double> uniform_H_grid(const RobotGeometry& g, int n);

// Sweeps the grid, solving theta per radius and evaluating G = F/U. Samples
// with theta < 1e-4 rad are excluded from the max (G is singular at theta=0).
// Ties resolve to the smallest H.
StiffnessResult stiffness_curve(const RobotGeometry& g, const FrictionModel& f,
                                double traction_fs, std::span<const double> H_grid,
                                double gravity = 9.80665);

// Pure-rolling condition: the demanded traction never exceeds mu_s * F_N.
bool check_pure_rolling(double traction, const FrictionModel& f);

}  // namespace pipebot
