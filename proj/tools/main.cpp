#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pipebot/config.hpp"
#include "pipebot/control.hpp"
#include "pipebot/plant.hpp"
#include "pipebot/power.hpp"
#include "pipebot/sim.hpp"
#include "pipebot/spring.hpp"

namespace {

constexpr int kExitDiverged = 2;
constexpr int kExitConfig = 3;

pipebot::Config load_or_default(const std::string& path) {
  if (path.empty()) return pipebot::default_config();
  return pipebot::load_config(path);
}

int cmd_characterize_spring(const std::string& config_path, int grid,
                            const std::string& csv_path) {
  const pipebot::Config cfg = load_or_default(config_path);
  const auto H = pipebot::uniform_H_grid(cfg.geometry, grid);
  const auto res = pipebot::stiffness_curve(cfg.geometry, cfg.friction,
                                            cfg.friction.wheel_traction_fs, H,
                                            cfg.body.gravity);
  std::printf("grid points        %zu\n", res.curve.size());
  std::printf("K_required [N/m]   %.9g\n", res.K_required);
  std::printf("at H [m]           %.9g\n", res.H_at_max);
  std::printf("at theta [rad]     %.9g\n", res.theta_at_max);
  if (!csv_path.empty()) {
    std::FILE* f = std::fopen(csv_path.c_str(), "wb");
    if (!f) {
      std::cerr << "cannot open for writing: " << csv_path << "\n";
      return 1;
    }
    std::fprintf(f, "H_m,theta_rad,G_N_per_m\n");
    for (const auto& p : res.curve)
      std::fprintf(f, "%.9g,%.9g,%.9g\n", p.pipe_radius_H, p.theta, p.required_G);
    std::fclose(f);
    std::printf("curve written to   %s\n", csv_path.c_str());
  }
  return 0;
}

int cmd_size_battery(const std::string& config_path, double h0, double tol) {
  const pipebot::Config cfg = load_or_default(config_path);
  const double torque = pipebot::motor_shaft_torque(cfg.friction.wheel_traction_fs,
                                                    cfg.geometry.wheel_radius_R,
                                                    cfg.motor.gear_ratio_n);
  const double draw = pipebot::extreme_current_draw(cfg.motor, torque);
  const auto plan = pipebot::size_battery(cfg.motor, cfg.battery, draw, h0, tol);
  std::printf("extreme draw [A]    %.9g\n", draw);
  std::printf("capacity [A.h]      %.9g\n", plan.capacity_Ah);
  std::printf("operation [h]       %.9g\n", plan.operation_hours);
  std::printf("discharge [h]       %.9g\n", plan.discharge_hours);
  std::printf("iterations          %d\n", plan.iterations);
  std::printf("converged           %s\n", plan.converged ? "yes" : "no");
  return plan.converged ? 0 : 1;
}

int cmd_lqr_design(const std::string& config_path) {
  const pipebot::Config cfg = load_or_default(config_path);
  const pipebot::Environment env = pipebot::make_environment(cfg);
  const pipebot::LinearizedSystem sys = pipebot::linearize(env);
  const pipebot::LqrGain gain = pipebot::design_lqr(sys, cfg.control);

  const Eigen::IOFormat fmt(9, 0, ", ", "\n", "  [", "]");
  std::cout << "trim torques u0 [N.m]\n  [" << sys.trim_input_u0.transpose() << "]\n";
  std::cout << "A2\n" << sys.A2.format(fmt) << "\n";
  std::cout << "B2\n" << sys.B2.format(fmt) << "\n";
  std::cout << "K\n" << gain.K.format(fmt) << "\n";
  std::cout << "P\n" << gain.P.format(fmt) << "\n";
  std::printf("riccati residual    %.3g\n", gain.residual);
  const Eigen::Vector4cd ev = (sys.A2 - sys.B2 * gain.K).eigenvalues();
  std::cout << "closed-loop poles\n";
  for (int i = 0; i < 4; ++i)
    std::printf("  %.6g %+.6gi\n", ev[i].real(), ev[i].imag());
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& scenario_arg,
                 const std::string& csv_path, long long seed) {
  pipebot::Config cfg = load_or_default(config_path);
  pipebot::SimScenario sc;
  try {
    sc = pipebot::scenario_preset(scenario_arg);
  } catch (const std::out_of_range&) {
    if (!std::filesystem::exists(scenario_arg))
      throw pipebot::ConfigError("not a preset name or readable file: " + scenario_arg);
    sc = pipebot::load_config(scenario_arg).scenario;
  }
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);

  const pipebot::RunResult run = pipebot::run_scenario(cfg, sc);
  if (!csv_path.empty()) pipebot::export_csv(run.telemetry, csv_path);

  const auto& s = run.summary;
  std::printf("scenario            %s\n", sc.name.c_str());
  std::printf("ticks               %zu\n", run.telemetry.size());
  if (s.diverged) {
    std::printf("DIVERGED at t=%.6g s\n", s.divergence_time);
    return kExitDiverged;
  }
  std::printf("tilt settle [s]     %.6g\n", s.tilt_settle_time);
  std::printf("vel settle [s]      %.6g\n", s.velocity_settle_time);
  std::printf("final phi [deg]     %.6g\n", s.final_phi * 180.0 / M_PI);
  std::printf("final psi [deg]     %.6g\n", s.final_psi * 180.0 / M_PI);
  std::printf("final v [m/s]       %.6g\n", s.final_v);
  std::printf("slip observed       %s\n", s.any_slip ? "yes" : "no");
  std::printf("in band at end      tilt=%s velocity=%s\n",
              s.tilt_in_band_at_end ? "yes" : "no",
              s.velocity_in_band_at_end ? "yes" : "no");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"in-pipe robot design toolkit: spring sizing, battery sizing, "
               "controller synthesis and closed-loop simulation"};
  app.require_subcommand(1);

  std::string config_path, csv_path, scenario_name = "default";
  int grid = 200;
  double h0 = 3.0, tol = 1e-3;
  long long seed = -1;

  auto* spring = app.add_subcommand("characterize-spring",
                                    "sweep pipe radii and report the required "
                                    "spring stiffness");
  spring->add_option("--config", config_path, "config file (INI)");
  spring->add_option("--grid", grid, "number of radius samples")->check(CLI::Range(2, 1000000));
  spring->add_option("--csv", csv_path, "write the sweep as CSV");

  auto* battery = app.add_subcommand("size-battery",
                                     "fixed-point battery sizing at the extreme draw");
  battery->add_option("--config", config_path, "config file (INI)");
  battery->add_option("--h0", h0, "initial operation-duration guess [h]");
  battery->add_option("--tol", tol, "convergence tolerance [h]");

  auto* lqr = app.add_subcommand("lqr-design",
                                 "trim, linearize and print the attitude LQR gain");
  lqr->add_option("--config", config_path, "config file (INI)");

  auto* sim = app.add_subcommand("simulate", "closed-loop run of a scenario");
  sim->add_option("--config", config_path, "config file (INI)");
  sim->add_option("--scenario", scenario_name, "preset name or scenario file");
  sim->add_option("--csv", csv_path, "telemetry output path");
  sim->add_option("--seed", seed, "override the scenario RNG seed");

  auto* print = app.add_subcommand("print-config",
                                   "write the annotated default config to stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (spring->parsed()) return cmd_characterize_spring(config_path, grid, csv_path);
    if (battery->parsed()) return cmd_size_battery(config_path, h0, tol);
    if (lqr->parsed()) return cmd_lqr_design(config_path);
    if (sim->parsed()) return cmd_simulate(config_path, scenario_name, csv_path, seed);
    if (print->parsed()) {
      std::cout << pipebot::render_default_config();
      return 0;
    }
  } catch (const pipebot::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pipebot::ValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
