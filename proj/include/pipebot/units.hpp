#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pipebot {

// Units accepted in config files. Everything is converted to SI on load;
// the solvers never see mixed systems.
enum class Unit {
  Meter,
  Millimeter,
  Centimeter,
  Inch,
  Newton,
  NewtonPerMeter,
  Volt,
  Ampere,
  AmpereHour,
  MilliampereHour,
  Second,
  Millisecond,
  Hour,
  Radian,
  Degree,
  RadianPerSecond,
  DegreePerSecond,
  MeterPerSecond,
  Kilogram,
  Gram,
  Ohm,
  Henry,
  Millihenry,
  Watt,
  KilogramMeterSq,   // rotational inertia
  NewtonMeter,       // torque
  NewtonMeterSecond, // rotational viscous damping, N·m·s/rad
  NewtonSecondPerMeter,       // translational viscous damping
  NewtonSecondSqPerMeterSq,   // quadratic drag coefficient
  Dimensionless,
};

enum class Dimension {
  Length,
  Force,
  Stiffness,
  Voltage,
  Current,
  Charge,
  Time,
  Angle,
  AngularVelocity,
  Velocity,
  Mass,
  Resistance,
  Inductance,
  Power,
  RotationalInertia,
  Torque,
  RotationalDamping,
  TranslationalDamping,
  DragCoefficient,
  None,
};

struct UnitValue {
  double magnitude = 0.0;
  Unit unit = Unit::Dimensionless;
};

struct UnitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Dimension dimension_of(Unit u);

// Multiplier taking one of `u` to the dimension's SI base unit.
double si_factor(Unit u);

// SI base unit of a dimension (Meter, Newton, ... Radian, Second).
Unit si_unit(Dimension d);

const char* unit_name(Unit u);

// Converts between units of the same dimension; throws UnitError on a
// dimension mismatch. Internals run in long double so a round trip stays
// within one machine epsilon.
UnitValue convert_unit(const UnitValue& v, Unit target);

// Parses "103 mm", "0.8", "4.5 inch", '"12 V"' (quotes optional).
UnitValue parse_quantity(std::string_view text);

// parse_quantity + dimension check + conversion to the SI base unit.
// Bare numbers are accepted as already-SI for the expected dimension.
double parse_si(std::string_view text, Dimension expected);

}  // namespace pipebot
