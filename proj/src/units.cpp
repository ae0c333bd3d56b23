#include "pipebot/units.hpp"

#include <cmath>
#include <cstdlib>
#include <map>

namespace pipebot {
namespace {

constexpr long double kPi = 3.141592653589793238462643383279502884L;

struct UnitInfo {
  Dimension dim;
  long double factor;  // to SI base unit
  const char* name;
};

const UnitInfo& info(Unit u) {
  static const std::map<Unit, UnitInfo> table = {
      {Unit::Meter, {Dimension::Length, 1.0L, "m"}},
      {Unit::Millimeter, {Dimension::Length, 0.001L, "mm"}},
      {Unit::Centimeter, {Dimension::Length, 0.01L, "cm"}},
      {Unit::Inch, {Dimension::Length, 0.0254L, "inch"}},
      {Unit::Newton, {Dimension::Force, 1.0L, "N"}},
      {Unit::NewtonPerMeter, {Dimension::Stiffness, 1.0L, "N/m"}},
      {Unit::Volt, {Dimension::Voltage, 1.0L, "V"}},
      {Unit::Ampere, {Dimension::Current, 1.0L, "A"}},
      {Unit::AmpereHour, {Dimension::Charge, 1.0L, "Ah"}},
      {Unit::MilliampereHour, {Dimension::Charge, 0.001L, "mAh"}},
      {Unit::Second, {Dimension::Time, 1.0L, "s"}},
      {Unit::Millisecond, {Dimension::Time, 0.001L, "ms"}},
      {Unit::Hour, {Dimension::Time, 3600.0L, "h"}},
      {Unit::Radian, {Dimension::Angle, 1.0L, "rad"}},
      {Unit::Degree, {Dimension::Angle, kPi / 180.0L, "deg"}},
      {Unit::RadianPerSecond, {Dimension::AngularVelocity, 1.0L, "rad/s"}},
      {Unit::DegreePerSecond, {Dimension::AngularVelocity, kPi / 180.0L, "deg/s"}},
      {Unit::MeterPerSecond, {Dimension::Velocity, 1.0L, "m/s"}},
      {Unit::Kilogram, {Dimension::Mass, 1.0L, "kg"}},
      {Unit::Gram, {Dimension::Mass, 0.001L, "g"}},
      {Unit::Ohm, {Dimension::Resistance, 1.0L, "ohm"}},
      {Unit::Henry, {Dimension::Inductance, 1.0L, "H"}},
      {Unit::Millihenry, {Dimension::Inductance, 0.001L, "mH"}},
      {Unit::Watt, {Dimension::Power, 1.0L, "W"}},
      {Unit::KilogramMeterSq, {Dimension::RotationalInertia, 1.0L, "kg.m^2"}},
      {Unit::NewtonMeter, {Dimension::Torque, 1.0L, "N.m"}},
      {Unit::NewtonMeterSecond, {Dimension::RotationalDamping, 1.0L, "N.m.s"}},
      {Unit::NewtonSecondPerMeter, {Dimension::TranslationalDamping, 1.0L, "N.s/m"}},
      {Unit::NewtonSecondSqPerMeterSq, {Dimension::DragCoefficient, 1.0L, "N.s^2/m^2"}},
      {Unit::Dimensionless, {Dimension::None, 1.0L, ""}},
  };
  return table.at(u);
}

// Accepted spellings for each unit token.
const std::map<std::string, Unit>& token_table() {
  static const std::map<std::string, Unit> table = {
      {"m", Unit::Meter},           {"mm", Unit::Millimeter},
      {"cm", Unit::Centimeter},     {"in", Unit::Inch},
      {"inch", Unit::Inch},         {"N", Unit::Newton},
      {"N/m", Unit::NewtonPerMeter},{"V", Unit::Volt},
      {"A", Unit::Ampere},          {"Ah", Unit::AmpereHour},
      {"A.h", Unit::AmpereHour},    {"mAh", Unit::MilliampereHour},
      {"s", Unit::Second},          {"ms", Unit::Millisecond},
      {"h", Unit::Hour},            {"hour", Unit::Hour},
      {"rad", Unit::Radian},        {"deg", Unit::Degree},
      {"rad/s", Unit::RadianPerSecond}, {"deg/s", Unit::DegreePerSecond},
      {"m/s", Unit::MeterPerSecond},{"kg", Unit::Kilogram},
      {"g", Unit::Gram},            {"ohm", Unit::Ohm},
      {"Ohm", Unit::Ohm},           {"H", Unit::Henry},
      {"mH", Unit::Millihenry},     {"W", Unit::Watt},
      {"kg.m^2", Unit::KilogramMeterSq}, {"N.m", Unit::NewtonMeter},
      {"N.m.s", Unit::NewtonMeterSecond}, {"N.s/m", Unit::NewtonSecondPerMeter},
      {"N.s^2/m^2", Unit::NewtonSecondSqPerMeterSq},
  };
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

Dimension dimension_of(Unit u) { return info(u).dim; }

double si_factor(Unit u) { return static_cast<double>(info(u).factor); }

const char* unit_name(Unit u) { return info(u).name; }

Unit si_unit(Dimension d) {
  switch (d) {
    case Dimension::Length: return Unit::Meter;
    case Dimension::Force: return Unit::Newton;
    case Dimension::Stiffness: return Unit::NewtonPerMeter;
    case Dimension::Voltage: return Unit::Volt;
    case Dimension::Current: return Unit::Ampere;
    case Dimension::Charge: return Unit::AmpereHour;
    case Dimension::Time: return Unit::Second;
    case Dimension::Angle: return Unit::Radian;
    case Dimension::AngularVelocity: return Unit::RadianPerSecond;
    case Dimension::Velocity: return Unit::MeterPerSecond;
    case Dimension::Mass: return Unit::Kilogram;
    case Dimension::Resistance: return Unit::Ohm;
    case Dimension::Inductance: return Unit::Henry;
    case Dimension::Power: return Unit::Watt;
    case Dimension::RotationalInertia: return Unit::KilogramMeterSq;
    case Dimension::Torque: return Unit::NewtonMeter;
    case Dimension::RotationalDamping: return Unit::NewtonMeterSecond;
    case Dimension::TranslationalDamping: return Unit::NewtonSecondPerMeter;
    case Dimension::DragCoefficient: return Unit::NewtonSecondSqPerMeterSq;
    case Dimension::None: return Unit::Dimensionless;
  }
  throw UnitError("unknown dimension");
}

UnitValue convert_unit(const UnitValue& v, Unit target) {
  const UnitInfo& from = info(v.unit);
  const UnitInfo& to = info(target);
  if (from.dim != to.dim) {
    throw UnitError(std::string("incompatible units: ") + from.name + " -> " + to.name);
  }
  // Single extended-precision expression, one rounding to double at the end.
  long double out = static_cast<long double>(v.magnitude) * from.factor / to.factor;
  return {static_cast<double>(out), target};
}

UnitValue parse_quantity(std::string_view text) {
  std::string_view s = trim(text);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = trim(s.substr(1, s.size() - 2));
  }
  if (s.empty()) throw UnitError("empty quantity");

  std::string buf(s);
  char* end = nullptr;
  double mag = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str()) throw UnitError("no numeric magnitude in '" + buf + "'");

  std::string_view rest = trim(std::string_view(end));
  if (rest.empty()) return {mag, Unit::Dimensionless};

  auto it = token_table().find(std::string(rest));
  if (it == token_table().end()) {
    throw UnitError("unknown unit token '" + std::string(rest) + "'");
  }
  return {mag, it->second};
}

double parse_si(std::string_view text, Dimension expected) {
  UnitValue v = parse_quantity(text);
  if (v.unit == Unit::Dimensionless && expected != Dimension::None) {
    // Bare number: treated as already expressed in the SI base unit.
    return v.magnitude;
  }
  if (dimension_of(v.unit) != expected) {
    throw UnitError(std::string("expected ") + unit_name(si_unit(expected)) +
                    "-compatible unit, got '" + unit_name(v.unit) + "'");
  }
  return convert_unit(v, si_unit(expected)).magnitude;
}

}  // namespace pipebot
