#include "pipebot/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace pipebot {

namespace {

constexpr double kDeg = M_PI / 180.0;

NoiseSpec preset_noise() {
  NoiseSpec n;
  n.gyro_sigma = 0.002;
  n.accel_sigma = 0.03;
  n.gyro_bias = {0.002, -0.001, 0.0015};
  return n;
}

SimScenario make_preset(const std::string& name, double phi_deg, double psi_deg,
                        double v_des, std::uint64_t seed, double flow = 0.0) {
  SimScenario sc;
  sc.name = name;
  sc.initial_phi = phi_deg * kDeg;
  sc.initial_psi = psi_deg * kDeg;
  sc.velocity_profile = {{0.0, v_des}};
  sc.flow_velocity = flow;
  sc.noise = preset_noise();
  sc.seed = seed;
  return sc;
}

}  // namespace

SimScenario scenario_preset(const std::string& name) {
  if (name == "default") return SimScenario{};
  if (name == "iteration1") return make_preset(name, -4.0, -3.0, 0.10, 11);
  if (name == "iteration2") return make_preset(name, -14.0, -11.0, 0.20, 12);
  if (name == "iteration3") return make_preset(name, -9.0, 5.0, 0.30, 13);
  if (name == "iteration4") return make_preset(name, -6.0, 4.0, 0.35, 14);
  if (name == "sim-012") return make_preset(name, 12.0, -8.0, 0.15, 112);
  if (name == "sim-017") return make_preset(name, -17.0, 6.0, 0.25, 117, -0.3);
  if (name == "sim-035") return make_preset(name, -3.5, 2.0, 0.35, 135);
  throw std::out_of_range("unknown scenario preset: " + name);
}

std::vector<std::string> scenario_preset_names() {
  return {"default",    "iteration1", "iteration2", "iteration3",
          "iteration4", "sim-012",    "sim-017",    "sim-035"};
}

RunResult run_scenario(const Config& cfg, const SimScenario& scenario) {
  scenario.validate();
  cfg.validate();

  Environment env = make_environment(cfg);
  env.pipe_radius_H = scenario.pipe_radius_H;
  env.flow_velocity = scenario.flow_velocity;

  const double period = cfg.control.control_period;
  const double dt = scenario.plant_dt;
  const long substeps = std::lround(period / dt);
  if (substeps < 1 || std::abs(substeps * dt - period) > 1e-9)
    throw ValidationError("control_period must be an integer multiple of plant_dt");

  RunResult result;
  result.gain = design_lqr(linearize(env), cfg.control);

  CombinedController controller(cfg.motor, cfg.control.pid, result.gain,
                                cfg.motor.voltage_limit);
  MahonyGains mg{cfg.estimation.mahony_kp, cfg.estimation.mahony_ki};

  PlantState x;
  x.phi = scenario.initial_phi;
  x.psi = scenario.initial_psi;

  std::mt19937_64 rng(scenario.seed);
  AttitudeEstimate att;
  EncoderStream enc;
  enc.pulses_per_rev = cfg.estimation.encoder_pulses_per_rev;
  std::array<MedianWindow, 3> median = {MedianWindow(cfg.control.velocity_median_window),
                                        MedianWindow(cfg.control.velocity_median_window),
                                        MedianWindow(cfg.control.velocity_median_window)};

  const long n_ticks = std::lround(std::ceil(scenario.duration / period - 1e-9));
  result.telemetry.reserve(n_ticks);

  bool first = true;
  for (long k = 0; k < n_ticks; ++k) {
    const double t = k * period;
    const ImuSample imu = imu_sense(x, scenario.noise, rng, t, env.body.gravity);
    if (first) {
      att = cfg.estimation.attitude_init_from_accel ? attitude_from_accel(imu.accel)
                                                    : AttitudeEstimate{};
      first = false;
    } else {
      att = mahony_update(att, imu, mg, period);
    }
    const Eigen::Vector2d rates = tilt_rates(att, imu.gyro);
    Eigen::Vector4d x2_hat(att.phi_hat, rates[0], att.psi_hat, rates[1]);

    std::array<double, 3> w_hat;
    for (int i = 0; i < 3; ++i) w_hat[i] = median[i].push(encoder_wheel_speed(enc, i));

    const TrajectoryRef ref = trajectory_reference(scenario.desired_velocity(t),
                                                   cfg.geometry, cfg.control.velocity_envelope);
    const ControllerOutput out = controller.step(x2_hat, w_hat, ref, period);

    TelemetryRecord rec;
    rec.t = t;
    rec.s = x.s;
    rec.v = x.v;
    rec.phi = x.phi;
    rec.phi_dot = x.phi_dot;
    rec.psi = x.psi;
    rec.psi_dot = x.psi_dot;
    rec.phi_hat = x2_hat[0];
    rec.phi_dot_hat = x2_hat[1];
    rec.psi_hat = x2_hat[2];
    rec.psi_dot_hat = x2_hat[3];
    rec.wheel_speed_hat = w_hat;
    rec.v_desired = ref.v_ref;
    rec.u_volts = {out.u_total[0], out.u_total[1], out.u_total[2]};
    rec.motor_currents = x.motor_currents;
    rec.saturated_channels =
        int(out.saturated[0]) + int(out.saturated[1]) + int(out.saturated[2]);

    bool slip_this_tick = false;
    try {
      for (long j = 0; j < substeps; ++j) {
        enc = encoder_sense(enc, x.wheel_speeds, dt);
        const StepResult sr = step(x, out.u_total, env, dt, t + j * dt);
        x = sr.state;
        slip_this_tick = slip_this_tick || sr.slip;
      }
    } catch (const DivergenceError& err) {
      rec.slip = slip_this_tick;
      result.telemetry.push_back(rec);
      result.summary = summarize(result.telemetry, scenario, 2.0 * kDeg, 0.05);
      result.summary.diverged = true;
      result.summary.divergence_time = err.time;
      return result;
    }
    rec.slip = slip_this_tick;
    result.telemetry.push_back(rec);
  }

  result.summary = summarize(result.telemetry, scenario, 2.0 * kDeg, 0.05);
  return result;
}

RunSummary summarize(const std::vector<TelemetryRecord>& telemetry,
                     const SimScenario& scenario, double tilt_band,
                     double velocity_band_frac) {
  RunSummary s;
  const double inf = std::numeric_limits<double>::infinity();
  if (telemetry.empty()) {
    s.tilt_settle_time = inf;
    s.velocity_settle_time = inf;
    return s;
  }

  const TelemetryRecord& last = telemetry.back();
  s.final_phi = last.phi;
  s.final_psi = last.psi;
  s.final_v = last.v;

  // Tilt: time of the last entry into the band (never leaves again).
  long last_out = -1;
  for (long i = 0; i < static_cast<long>(telemetry.size()); ++i) {
    const auto& r = telemetry[i];
    if (std::abs(r.phi) > tilt_band || std::abs(r.psi) > tilt_band) last_out = i;
    s.any_slip = s.any_slip || r.slip;
  }
  s.tilt_in_band_at_end = last_out + 1 < static_cast<long>(telemetry.size());
  s.tilt_settle_time = last_out < 0 ? 0.0
                       : s.tilt_in_band_at_end ? telemetry[last_out + 1].t
                                               : inf;

  // Velocity: judged against the final commanded speed, only after the last
  // profile step begins. A zero command turns the fractional band into an
  // absolute one of the same numeric value.
  const double v_cmd = last.v_desired;
  const double v_band = v_cmd != 0.0 ? velocity_band_frac * std::abs(v_cmd)
                                     : velocity_band_frac;
  double t_last_step = 0.0;
  for (const auto& step : scenario.velocity_profile)
    t_last_step = std::max(t_last_step, step.t_start);
  long v_last_out = -1;
  long first_eligible = -1;
  for (long i = 0; i < static_cast<long>(telemetry.size()); ++i) {
    if (telemetry[i].t < t_last_step) continue;
    if (first_eligible < 0) first_eligible = i;
    if (std::abs(telemetry[i].v - v_cmd) > v_band) v_last_out = i;
  }
  s.velocity_in_band_at_end =
      first_eligible >= 0 && v_last_out + 1 < static_cast<long>(telemetry.size());
  if (first_eligible < 0) {
    s.velocity_settle_time = inf;
  } else if (v_last_out < 0) {
    s.velocity_settle_time = telemetry[first_eligible].t;
  } else {
    s.velocity_settle_time =
        s.velocity_in_band_at_end ? telemetry[v_last_out + 1].t : inf;
  }

  // Residual tilt motion after the attitude transient has finished.
  s.max_tilt_rate_after_settle = s.tilt_in_band_at_end ? 0.0 : inf;
  if (s.tilt_in_band_at_end) {
    for (const auto& r : telemetry) {
      if (r.t < s.tilt_settle_time) continue;
      s.max_tilt_rate_after_settle = std::max(
          {s.max_tilt_rate_after_settle, std::abs(r.phi_dot), std::abs(r.psi_dot)});
    }
  }
  return s;
}

std::string render_csv(const std::vector<TelemetryRecord>& telemetry) {
  std::string out =
      "t,s,v,phi,phi_dot,psi,psi_dot,phi_hat,phi_dot_hat,psi_hat,psi_dot_hat,"
      "w1_hat,w2_hat,w3_hat,v_des,u1,u2,u3,i1,i2,i3,slip,sat\n";
  char buf[64];
  auto put = [&](double x, char sep) {
    std::snprintf(buf, sizeof(buf), "%.9g%c", x, sep);
    out += buf;
  };
  for (const auto& r : telemetry) {
    put(r.t, ',');
    put(r.s, ',');
    put(r.v, ',');
    put(r.phi, ',');
    put(r.phi_dot, ',');
    put(r.psi, ',');
    put(r.psi_dot, ',');
    put(r.phi_hat, ',');
    put(r.phi_dot_hat, ',');
    put(r.psi_hat, ',');
    put(r.psi_dot_hat, ',');
    for (int i = 0; i < 3; ++i) put(r.wheel_speed_hat[i], ',');
    put(r.v_desired, ',');
    for (int i = 0; i < 3; ++i) put(r.u_volts[i], ',');
    for (int i = 0; i < 3; ++i) put(r.motor_currents[i], ',');
    std::snprintf(buf, sizeof(buf), "%d,%d\n", r.slip ? 1 : 0, r.saturated_channels);
    out += buf;
  }
  return out;
}

void export_csv(const std::vector<TelemetryRecord>& telemetry, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << render_csv(telemetry);
}

}  // namespace pipebot
