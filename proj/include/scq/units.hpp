#pragma once

#include <string>
#include <string_view>

namespace scq::units {

enum class Dimension {
    Dimensionless,
    Temperature,
    Resistance,
    Current,
    Voltage,
    Frequency,
    Time,
    Length,
    Power,
    Exposure,
    CurrentDensity,
    Capacitance,
    SpecificResistance,
};

[[nodiscard]] std::string_view to_string(Dimension d);

/// SI unit name used when serializing values of this dimension.
[[nodiscard]] std::string_view si_unit(Dimension d);

/// Converts `value` given in `unit` to SI. An empty unit means SI already.
/// dBm is accepted for power and handled logarithmically.
/// Throws SchemaError when the unit is unknown or of another dimension.
[[nodiscard]] double to_si(double value, std::string_view unit, Dimension d);

/// Whether `unit` names a unit of dimension `d`.
[[nodiscard]] bool is_unit_of(std::string_view unit, Dimension d);

/// Parses "<number> [unit]" (e.g. "10 um", "300", "-95 dBm") into SI.
[[nodiscard]] double parse_quantity(std::string_view text, Dimension d);

} // namespace scq::units
