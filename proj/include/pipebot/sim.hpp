#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pipebot/control.hpp"
#include "pipebot/estimation.hpp"
#include "pipebot/plant.hpp"
#include "pipebot/types.hpp"

namespace pipebot {

// One row per control tick (10 ms by default).
struct TelemetryRecord {
  double t = 0.0;
  // Truth
  double s = 0.0, v = 0.0;
  double phi = 0.0, phi_dot = 0.0, psi = 0.0, psi_dot = 0.0;
  // Estimates fed to the controller
  double phi_hat = 0.0, phi_dot_hat = 0.0, psi_hat = 0.0, psi_dot_hat = 0.0;
  std::array<double, 3> wheel_speed_hat{};
  // Commands and references
  double v_desired = 0.0;
  std::array<double, 3> u_volts{};
  std::array<double, 3> motor_currents{};
  bool slip = false;
  int saturated_channels = 0;
};

struct RunSummary {
  bool diverged = false;
  double divergence_time = 0.0;
  // Last entry into the +/-2 deg band around zero tilt (inf = never settles).
  double tilt_settle_time = 0.0;
  // Last entry into the +/-5% band around the final commanded velocity.
  double velocity_settle_time = 0.0;
  double final_phi = 0.0, final_psi = 0.0, final_v = 0.0;
  double max_tilt_rate_after_settle = 0.0;  // max |phi_dot|,|psi_dot| after tilt settle [rad/s]
  bool tilt_in_band_at_end = false;
  bool velocity_in_band_at_end = false;
  bool any_slip = false;
};

struct RunResult {
  std::vector<TelemetryRecord> telemetry;
  RunSummary summary;
  LqrGain gain;  // the synthesized controller, for inspection
};

// Closed-loop run: sensors -> estimator -> combined controller at the control
// period, plant stepped at scenario.plant_dt with zero-order-held voltages.
// Divergence is caught and reported in the summary with the telemetry
// collected so far.
RunResult run_scenario(const Config& cfg, const SimScenario& scenario);

// Band metrics over a finished telemetry log. tilt_band in rad, velocity_band
// as a fraction of the final commanded speed (a zero command makes the
// velocity criterion an absolute band of the same numeric value in m/s).
RunSummary summarize(const std::vector<TelemetryRecord>& telemetry,
                     const SimScenario& scenario, double tilt_band,
                     double velocity_band_frac);

// Deterministic CSV dump (%.9g, LF line ends, fixed column set).
void export_csv(const std::vector<TelemetryRecord>& telemetry, const std::string& path);
std::string render_csv(const std::vector<TelemetryRecord>& telemetry);

// Named initial-condition presets used by the verification suite. Throws
// std::out_of_range for unknown names.
SimScenario scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

}  // namespace pipebot
