#include "pipebot/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "pipebot/units.hpp"

namespace pipebot {

// ---------------------------------------------------------------------------
// Validation

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace

void RobotGeometry::validate() const {
  require(arm_length_a > 0, "geometry.arm_length must be > 0");
  require(pivot_offset_t > 0 && pivot_offset_t < arm_length_a,
          "geometry.pivot_offset must satisfy 0 < t < arm_length");
  require(contact_arm_L > 0, "geometry.contact_arm_length must be > 0");
  require(wheel_radius_R > 0, "geometry.wheel_radius must be > 0");
  require(robot_mass_m > 0, "geometry.robot_mass must be > 0");
  require(pipe_radius_min_H > 0 && pipe_radius_min_H <= pipe_radius_max_H,
          "geometry pipe radius range must satisfy 0 < min <= max");
}

void MotorParams::validate() const {
  require(terminal_resistance_Rm > 0, "motor.terminal_resistance must be > 0");
  require(terminal_inductance_Lm > 0, "motor.terminal_inductance must be > 0");
  require(back_emf_Kv > 0, "motor.back_emf_constant must be > 0");
  require(gear_ratio_n >= 1, "motor.gear_ratio must be >= 1");
  require(load_inertia_Il > 0 && rotor_inertia_IR > 0, "motor inertias must be > 0");
  require(nominal_voltage_Vn > 0, "motor.nominal_voltage must be > 0");
  require(rated_power_P > 0, "motor.rated_power must be > 0");
  require(voltage_limit > 0, "motor.voltage_limit must be > 0");
}

void FrictionModel::validate() const {
  require(mu_s > 0 && mu_s <= 2.0, "friction.static_coefficient must be in (0, 2]");
  require(normal_force_FN > 0, "friction.normal_force must be > 0");
  require(wheel_traction_fs >= 0, "friction.wheel_traction must be >= 0");
}

double BatteryModel::usable_fraction(double current_A) const {
  if (discharge_curve.empty()) return 1.0;
  if (discharge_curve.size() == 1 || current_A <= discharge_curve.front().current_A)
    return discharge_curve.front().usable_fraction;
  if (current_A >= discharge_curve.back().current_A)
    return discharge_curve.back().usable_fraction;
  for (std::size_t i = 1; i < discharge_curve.size(); ++i) {
    const auto& lo = discharge_curve[i - 1];
    const auto& hi = discharge_curve[i];
    if (current_A <= hi.current_A) {
      double w = (current_A - lo.current_A) / (hi.current_A - lo.current_A);
      return lo.usable_fraction + w * (hi.usable_fraction - lo.usable_fraction);
    }
  }
  return discharge_curve.back().usable_fraction;
}

void BatteryModel::validate() const {
  require(capacity_Ah > 0, "battery.capacity must be > 0");
  require(nominal_voltage > 0, "battery.nominal_voltage must be > 0");
  for (std::size_t i = 0; i < discharge_curve.size(); ++i) {
    const auto& p = discharge_curve[i];
    require(p.current_A >= 0, "battery.discharge_curve currents must be >= 0");
    require(p.usable_fraction > 0 && p.usable_fraction <= 1.0,
            "battery.discharge_curve fractions must be in (0, 1]");
    if (i > 0)
      require(p.current_A > discharge_curve[i - 1].current_A,
              "battery.discharge_curve currents must be strictly increasing");
  }
}

void DragModel::validate() const {
  require(coefficient_c >= 0, "drag.coefficient must be >= 0");
}

void BodyParams::validate() const {
  require(tilt_inertia_roll > 0 && tilt_inertia_pitch > 0, "body tilt inertias must be > 0");
  require(gravity > 0, "body.gravity must be > 0");
  require(roll_coupling_rho != 0, "body.roll_coupling must be nonzero");
  // Damping signs are deliberately unconstrained so tests can build divergent
  // plants; CoM offsets may take any sign.
}

void ControlParams::validate() const {
  for (double q : lqr_q_diag) require(q >= 0, "control.lqr_q entries must be >= 0");
  require(lqr_r_diag > 0, "control.lqr_r must be > 0");
  require(pid.kp >= 0 && pid.ki >= 0 && pid.kd >= 0, "control PID gains must be >= 0");
  require(control_period > 0, "control.control_period must be > 0");
  require(velocity_median_window >= 1 && velocity_median_window % 2 == 1,
          "control.velocity_median_window must be odd and >= 1");
  require(velocity_envelope > 0, "control.velocity_envelope must be > 0");
}

void EstimationParams::validate() const {
  require(mahony_kp >= 0 && mahony_ki >= 0, "estimation Mahony gains must be >= 0");
  require(encoder_pulses_per_rev >= 1, "estimation.encoder_pulses_per_rev must be >= 1");
}

double SimScenario::desired_velocity(double t) const {
  double v = 0.0;
  for (const auto& step : velocity_profile) {
    if (t >= step.t_start) v = step.v_target;
  }
  return v;
}

void SimScenario::validate() const {
  require(duration > 0, "scenario.duration must be > 0");
  require(plant_dt > 0 && plant_dt <= 0.01, "scenario.plant_dt must be in (0, 10 ms]");
  require(pipe_radius_H > 0, "scenario.pipe_radius must be > 0");
  require(std::abs(initial_phi) < M_PI / 2 && std::abs(initial_psi) < M_PI / 2,
          "scenario initial tilt must be inside (-90, 90) deg");
  require(!velocity_profile.empty(), "scenario.velocity_profile must not be empty");
  for (std::size_t i = 1; i < velocity_profile.size(); ++i)
    require(velocity_profile[i].t_start > velocity_profile[i - 1].t_start,
            "scenario.velocity_profile times must be strictly increasing");
  require(noise.gyro_sigma >= 0 && noise.accel_sigma >= 0,
          "scenario noise sigmas must be >= 0");
}

void Config::validate() const {
  geometry.validate();
  motor.validate();
  friction.validate();
  battery.validate();
  drag.validate();
  body.validate();
  control.validate();
  estimation.validate();
  scenario.validate();
  // Cross checks.
  double ratio = control.control_period / scenario.plant_dt;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 && ratio >= 1,
          "control.control_period must be an integer multiple of scenario.plant_dt");
}

// ---------------------------------------------------------------------------
// Parsing

Config default_config() { return Config{}; }

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, e - b + 1);
}

// "0:1.0, 5:0.9" -> pairs. Shared by the discharge curve and velocity profile.
std::vector<std::pair<double, double>> parse_pair_list(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("expected 'a:b' pair, got '" + item + "'");
    out.emplace_back(std::stod(trim(item.substr(0, colon))),
                     std::stod(trim(item.substr(colon + 1))));
  }
  return out;
}

std::array<double, 3> parse_triplet(const std::string& text) {
  std::string cleaned = text;
  std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
  std::stringstream ss(cleaned);
  std::array<double, 3> v{};
  if (!(ss >> v[0] >> v[1] >> v[2])) throw ConfigError("expected three numbers: '" + text + "'");
  std::string rest;
  if (ss >> rest) throw ConfigError("expected exactly three numbers: '" + text + "'");
  return v;
}

using Setter = std::function<void(Config&, const std::string&)>;

double si(const std::string& v, Dimension d) { return parse_si(v, d); }

const std::map<std::string, Setter>& key_table() {
  using D = Dimension;
  static const std::map<std::string, Setter> table = {
      // [geometry]
      {"geometry.arm_length", [](Config& c, const std::string& v) { c.geometry.arm_length_a = si(v, D::Length); }},
      {"geometry.pivot_offset", [](Config& c, const std::string& v) { c.geometry.pivot_offset_t = si(v, D::Length); }},
      {"geometry.contact_arm_length", [](Config& c, const std::string& v) { c.geometry.contact_arm_L = si(v, D::Length); }},
      {"geometry.wheel_radius", [](Config& c, const std::string& v) { c.geometry.wheel_radius_R = si(v, D::Length); }},
      {"geometry.robot_mass", [](Config& c, const std::string& v) { c.geometry.robot_mass_m = si(v, D::Mass); }},
      {"geometry.pipe_radius_min", [](Config& c, const std::string& v) { c.geometry.pipe_radius_min_H = si(v, D::Length); }},
      {"geometry.pipe_radius_max", [](Config& c, const std::string& v) { c.geometry.pipe_radius_max_H = si(v, D::Length); }},
      // [motor]
      {"motor.terminal_resistance", [](Config& c, const std::string& v) { c.motor.terminal_resistance_Rm = si(v, D::Resistance); }},
      {"motor.terminal_inductance", [](Config& c, const std::string& v) { c.motor.terminal_inductance_Lm = si(v, D::Inductance); }},
      {"motor.back_emf_constant", [](Config& c, const std::string& v) { c.motor.back_emf_Kv = std::stod(v); }},
      {"motor.gear_ratio", [](Config& c, const std::string& v) { c.motor.gear_ratio_n = std::stod(v); }},
      {"motor.load_inertia", [](Config& c, const std::string& v) { c.motor.load_inertia_Il = si(v, D::RotationalInertia); }},
      {"motor.rotor_inertia", [](Config& c, const std::string& v) { c.motor.rotor_inertia_IR = si(v, D::RotationalInertia); }},
      {"motor.nominal_voltage", [](Config& c, const std::string& v) { c.motor.nominal_voltage_Vn = si(v, D::Voltage); }},
      {"motor.rated_power", [](Config& c, const std::string& v) { c.motor.rated_power_P = si(v, D::Power); }},
      {"motor.voltage_limit", [](Config& c, const std::string& v) { c.motor.voltage_limit = si(v, D::Voltage); }},
      // [friction]
      {"friction.static_coefficient", [](Config& c, const std::string& v) { c.friction.mu_s = std::stod(v); }},
      {"friction.normal_force", [](Config& c, const std::string& v) { c.friction.normal_force_FN = si(v, D::Force); }},
      {"friction.wheel_traction", [](Config& c, const std::string& v) { c.friction.wheel_traction_fs = si(v, D::Force); }},
      // [battery]
      {"battery.capacity", [](Config& c, const std::string& v) { c.battery.capacity_Ah = si(v, D::Charge); }},
      {"battery.nominal_voltage", [](Config& c, const std::string& v) { c.battery.nominal_voltage = si(v, D::Voltage); }},
      {"battery.discharge_curve", [](Config& c, const std::string& v) {
         c.battery.discharge_curve.clear();
         for (auto [i, f] : parse_pair_list(v)) c.battery.discharge_curve.push_back({i, f});
       }},
      // [drag]
      {"drag.coefficient", [](Config& c, const std::string& v) { c.drag.coefficient_c = si(v, D::DragCoefficient); }},
      // [body]
      {"body.tilt_inertia_roll", [](Config& c, const std::string& v) { c.body.tilt_inertia_roll = si(v, D::RotationalInertia); }},
      {"body.tilt_inertia_pitch", [](Config& c, const std::string& v) { c.body.tilt_inertia_pitch = si(v, D::RotationalInertia); }},
      {"body.com_offset_axial", [](Config& c, const std::string& v) { c.body.com_offset_axial = si(v, D::Length); }},
      {"body.com_offset_lateral", [](Config& c, const std::string& v) { c.body.com_offset_lateral = si(v, D::Length); }},
      {"body.com_offset_vertical", [](Config& c, const std::string& v) { c.body.com_offset_vertical = si(v, D::Length); }},
      {"body.damping_roll", [](Config& c, const std::string& v) { c.body.damping_roll = si(v, D::RotationalDamping); }},
      {"body.damping_pitch", [](Config& c, const std::string& v) { c.body.damping_pitch = si(v, D::RotationalDamping); }},
      {"body.damping_axial", [](Config& c, const std::string& v) { c.body.damping_axial = si(v, D::TranslationalDamping); }},
      {"body.roll_coupling", [](Config& c, const std::string& v) { c.body.roll_coupling_rho = std::stod(v); }},
      {"body.gravity", [](Config& c, const std::string& v) { c.body.gravity = std::stod(v); }},
      // [control]
      {"control.lqr_q", [](Config& c, const std::string& v) {
         std::stringstream ss(v);
         for (double& q : c.control.lqr_q_diag)
           if (!(ss >> q)) throw ConfigError("control.lqr_q needs 4 numbers");
       }},
      {"control.lqr_r", [](Config& c, const std::string& v) { c.control.lqr_r_diag = std::stod(v); }},
      {"control.pid_kp", [](Config& c, const std::string& v) { c.control.pid.kp = std::stod(v); }},
      {"control.pid_ki", [](Config& c, const std::string& v) { c.control.pid.ki = std::stod(v); }},
      {"control.pid_kd", [](Config& c, const std::string& v) { c.control.pid.kd = std::stod(v); }},
      {"control.control_period", [](Config& c, const std::string& v) { c.control.control_period = si(v, D::Time); }},
      {"control.velocity_median_window", [](Config& c, const std::string& v) { c.control.velocity_median_window = std::stoi(v); }},
      {"control.velocity_envelope", [](Config& c, const std::string& v) { c.control.velocity_envelope = si(v, D::Velocity); }},
      // [estimation]
      {"estimation.mahony_kp", [](Config& c, const std::string& v) { c.estimation.mahony_kp = std::stod(v); }},
      {"estimation.mahony_ki", [](Config& c, const std::string& v) { c.estimation.mahony_ki = std::stod(v); }},
      {"estimation.encoder_pulses_per_rev", [](Config& c, const std::string& v) { c.estimation.encoder_pulses_per_rev = std::stoi(v); }},
      {"estimation.attitude_init", [](Config& c, const std::string& v) {
         if (v == "accel") c.estimation.attitude_init_from_accel = true;
         else if (v == "identity") c.estimation.attitude_init_from_accel = false;
         else throw ConfigError("estimation.attitude_init must be 'accel' or 'identity'");
       }},
      // [scenario]
      {"scenario.name", [](Config& c, const std::string& v) { c.scenario.name = v; }},
      {"scenario.duration", [](Config& c, const std::string& v) { c.scenario.duration = si(v, D::Time); }},
      {"scenario.plant_dt", [](Config& c, const std::string& v) { c.scenario.plant_dt = si(v, D::Time); }},
      {"scenario.pipe_radius", [](Config& c, const std::string& v) { c.scenario.pipe_radius_H = si(v, D::Length); }},
      {"scenario.initial_roll", [](Config& c, const std::string& v) { c.scenario.initial_phi = si(v, D::Angle); }},
      {"scenario.initial_pitch", [](Config& c, const std::string& v) { c.scenario.initial_psi = si(v, D::Angle); }},
      {"scenario.flow_velocity", [](Config& c, const std::string& v) { c.scenario.flow_velocity = si(v, D::Velocity); }},
      {"scenario.velocity_profile", [](Config& c, const std::string& v) {
         c.scenario.velocity_profile.clear();
         for (auto [t, vel] : parse_pair_list(v)) c.scenario.velocity_profile.push_back({t, vel});
       }},
      {"scenario.gyro_noise_sigma", [](Config& c, const std::string& v) { c.scenario.noise.gyro_sigma = std::stod(v); }},
      {"scenario.accel_noise_sigma", [](Config& c, const std::string& v) { c.scenario.noise.accel_sigma = std::stod(v); }},
      {"scenario.gyro_bias", [](Config& c, const std::string& v) { c.scenario.noise.gyro_bias = parse_triplet(v); }},
      {"scenario.seed", [](Config& c, const std::string& v) { c.scenario.seed = std::stoull(v); }},
  };
  return table;
}

}  // namespace

Config parse_config(const std::string& text, const std::string& origin) {
  Config cfg = default_config();
  std::stringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    auto where = [&] { return origin + ":" + std::to_string(lineno); };
    // Strip comments (# or ;) outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (!quoted && (line[i] == '#' || line[i] == ';')) {
        line.erase(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where() + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = trim(value.substr(1, value.size() - 2));
    if (section.empty()) throw ConfigError(where() + ": key outside any [section]");
    auto it = key_table().find(section + "." + key);
    if (it == key_table().end())
      throw ConfigError(where() + ": unknown key '" + section + "." + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(where() + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file: " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), file.string());
}

std::string render_default_config() {
  const Config c;
  std::ostringstream os;
  os.precision(12);
  os << "# Default parameter set. Values tagged 'assumed' are fixtures that the\n"
        "# published mechanism leaves unspecified; everything else is the published\n"
        "# value. Quantities accept unit suffixes (mm, inch, deg, Ah, ...); bare\n"
        "# numbers are SI.\n"
        "\n[geometry]\n"
     << "arm_length = 103 mm\n"
     << "pivot_offset = 36 mm\n"
     << "contact_arm_length = 300 mm   # assumed; must exceed pipe_radius_max\n"
     << "wheel_radius = 65 mm          # assumed\n"
     << "robot_mass = 4.0 kg           # assumed\n"
     << "pipe_radius_min = 4.5 inch\n"
     << "pipe_radius_max = 11 inch\n"
     << "\n[motor]\n"
     << "terminal_resistance = 8.5 ohm # assumed; keeps stall traction below the slip bound\n"
     << "terminal_inductance = 42.5 mH # assumed; tau_e = 5 ms\n"
     << "back_emf_constant = 0.009     # V.s/rad, assumed; makes the design-point draw 5 A\n"
     << "gear_ratio = 26\n"
     << "load_inertia = 2.0e-4 kg.m^2  # assumed\n"
     << "rotor_inertia = 4.0e-7 kg.m^2 # assumed\n"
     << "nominal_voltage = 12 V\n"
     << "rated_power = 20 W            # back-derived from the battery sizing triple\n"
     << "voltage_limit = 12 V\n"
     << "\n[friction]\n"
     << "static_coefficient = 0.8\n"
     << "normal_force = 7.5 N\n"
     << "wheel_traction = 6 N\n"
     << "\n[battery]\n"
     << "capacity = 15 Ah\n"
     << "nominal_voltage = 12 V\n"
     << "# discharge_curve = 0:1.0, 10:0.9   # current:usable-fraction; default flat 1.0\n"
     << "\n[drag]\n"
     << "coefficient = 12.5 N.s^2/m^2  # calibrated: 18 N at 1.2 m/s relative flow\n"
     << "\n[body]                        # simulated rigid body; entirely assumed\n"
     << "tilt_inertia_roll = 0.02 kg.m^2\n"
     << "tilt_inertia_pitch = 0.04 kg.m^2\n"
     << "com_offset_axial = 8 mm\n"
     << "com_offset_lateral = 4 mm\n"
     << "com_offset_vertical = 15 mm\n"
     << "damping_roll = 0.05 N.m.s\n"
     << "damping_pitch = 0.08 N.m.s\n"
     << "damping_axial = 1.0 N.s/m\n"
     << "roll_coupling = 0.35\n"
     << "gravity = 9.80665\n"
     << "\n[control]\n"
     << "lqr_q = " << c.control.lqr_q_diag[0] << " " << c.control.lqr_q_diag[1] << " "
     << c.control.lqr_q_diag[2] << " " << c.control.lqr_q_diag[3] << "\n"
     << "lqr_r = " << c.control.lqr_r_diag << "\n"
     << "pid_kp = " << c.control.pid.kp << "   # retuned for the 16-pulse encoder delay\n"
     << "pid_ki = " << c.control.pid.ki << "\n"
     << "pid_kd = " << c.control.pid.kd << "\n"
     << "control_period = 10 ms\n"
     << "velocity_median_window = " << c.control.velocity_median_window << "\n"
     << "velocity_envelope = " << c.control.velocity_envelope << " m/s\n"
     << "\n[estimation]\n"
     << "mahony_kp = " << c.estimation.mahony_kp << "\n"
     << "mahony_ki = " << c.estimation.mahony_ki << "\n"
     << "encoder_pulses_per_rev = " << c.estimation.encoder_pulses_per_rev << "   # assumed\n"
     << "attitude_init = accel\n"
     << "\n[scenario]\n"
     << "name = default\n"
     << "duration = 10 s\n"
     << "plant_dt = 1 ms\n"
     << "pipe_radius = 7 inch\n"
     << "initial_roll = 0 deg\n"
     << "initial_pitch = 0 deg\n"
     << "flow_velocity = 0 m/s\n"
     << "velocity_profile = 0:0.1\n"
     << "gyro_noise_sigma = " << c.scenario.noise.gyro_sigma << "\n"
     << "accel_noise_sigma = " << c.scenario.noise.accel_sigma << "\n"
     << "seed = " << c.scenario.seed << "\n";
  return os.str();
}

}  // namespace pipebot
