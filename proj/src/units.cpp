#include "scq/units.hpp"

#include "scq/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>

namespace scq::units {

namespace {

struct UnitEntry {
    std::string_view name;
    Dimension dimension;
    double scale;
};

using D = Dimension;

constexpr std::array kUnits = {
    UnitEntry{"1", D::Dimensionless, 1.0},
    UnitEntry{"K", D::Temperature, 1.0},
    UnitEntry{"mK", D::Temperature, 1e-3},
    UnitEntry{"uK", D::Temperature, 1e-6},
    UnitEntry{"ohm", D::Resistance, 1.0},
    UnitEntry{"Ohm", D::Resistance, 1.0},
    UnitEntry{"mohm", D::Resistance, 1e-3},
    UnitEntry{"kohm", D::Resistance, 1e3},
    UnitEntry{"kOhm", D::Resistance, 1e3},
    UnitEntry{"Mohm", D::Resistance, 1e6},
    UnitEntry{"MOhm", D::Resistance, 1e6},
    UnitEntry{"A", D::Current, 1.0},
    UnitEntry{"mA", D::Current, 1e-3},
    UnitEntry{"uA", D::Current, 1e-6},
    UnitEntry{"nA", D::Current, 1e-9},
    UnitEntry{"pA", D::Current, 1e-12},
    UnitEntry{"V", D::Voltage, 1.0},
    UnitEntry{"mV", D::Voltage, 1e-3},
    UnitEntry{"uV", D::Voltage, 1e-6},
    UnitEntry{"nV", D::Voltage, 1e-9},
    UnitEntry{"Hz", D::Frequency, 1.0},
    UnitEntry{"kHz", D::Frequency, 1e3},
    UnitEntry{"MHz", D::Frequency, 1e6},
    UnitEntry{"GHz", D::Frequency, 1e9},
    UnitEntry{"s", D::Time, 1.0},
    UnitEntry{"ms", D::Time, 1e-3},
    UnitEntry{"us", D::Time, 1e-6},
    UnitEntry{"ns", D::Time, 1e-9},
    UnitEntry{"min", D::Time, 60.0},
    UnitEntry{"h", D::Time, 3600.0},
    UnitEntry{"m", D::Length, 1.0},
    UnitEntry{"mm", D::Length, 1e-3},
    UnitEntry{"um", D::Length, 1e-6},
    UnitEntry{"nm", D::Length, 1e-9},
    UnitEntry{"W", D::Power, 1.0},
    UnitEntry{"mW", D::Power, 1e-3},
    UnitEntry{"uW", D::Power, 1e-6},
    UnitEntry{"nW", D::Power, 1e-9},
    UnitEntry{"pW", D::Power, 1e-12},
    UnitEntry{"fW", D::Power, 1e-15},
    UnitEntry{"aW", D::Power, 1e-18},
    UnitEntry{"Pa_s", D::Exposure, 1.0},
    UnitEntry{"Pa*s", D::Exposure, 1.0},
    UnitEntry{"Torr_s", D::Exposure, 101325.0 / 760.0},
    UnitEntry{"mTorr_s", D::Exposure, 101325.0 / 760.0 * 1e-3},
    UnitEntry{"A/m2", D::CurrentDensity, 1.0},
    UnitEntry{"A/m^2", D::CurrentDensity, 1.0},
    UnitEntry{"A/cm2", D::CurrentDensity, 1e4},
    UnitEntry{"A/cm^2", D::CurrentDensity, 1e4},
    UnitEntry{"kA/cm2", D::CurrentDensity, 1e7},
    UnitEntry{"kA/cm^2", D::CurrentDensity, 1e7},
    UnitEntry{"uA/um2", D::CurrentDensity, 1e6},
    UnitEntry{"uA/um^2", D::CurrentDensity, 1e6},
    UnitEntry{"F", D::Capacitance, 1.0},
    UnitEntry{"nF", D::Capacitance, 1e-9},
    UnitEntry{"pF", D::Capacitance, 1e-12},
    UnitEntry{"fF", D::Capacitance, 1e-15},
    UnitEntry{"ohm_m2", D::SpecificResistance, 1.0},
    UnitEntry{"ohm_um2", D::SpecificResistance, 1e-12},
};

// Maps the micro sign, Greek mu and omega spellings to ASCII names.
std::string ascii_unit(std::string_view unit) {
    std::string out(unit);
    for (std::string_view mu : {std::string_view("\xC2\xB5"), std::string_view("\xCE\xBC")}) {
        if (out.starts_with(mu)) out = "u" + out.substr(mu.size());
    }
    if (out == "\xCE\xA9") out = "ohm";
    return out;
}

const UnitEntry* find(std::string_view unit) {
    for (const auto& u : kUnits) {
        if (u.name == unit) return &u;
    }
    return nullptr;
}

} // namespace

std::string_view to_string(Dimension d) {
    switch (d) {
    case D::Dimensionless: return "dimensionless";
    case D::Temperature: return "temperature";
    case D::Resistance: return "resistance";
    case D::Current: return "current";
    case D::Voltage: return "voltage";
    case D::Frequency: return "frequency";
    case D::Time: return "time";
    case D::Length: return "length";
    case D::Power: return "power";
    case D::Exposure: return "exposure";
    case D::CurrentDensity: return "current density";
    case D::Capacitance: return "capacitance";
    case D::SpecificResistance: return "specific resistance";
    }
    return "unknown";
}

std::string_view si_unit(Dimension d) {
    switch (d) {
    case D::Dimensionless: return "1";
    case D::Temperature: return "K";
    case D::Resistance: return "ohm";
    case D::Current: return "A";
    case D::Voltage: return "V";
    case D::Frequency: return "Hz";
    case D::Time: return "s";
    case D::Length: return "m";
    case D::Power: return "W";
    case D::Exposure: return "Pa_s";
    case D::CurrentDensity: return "A/m2";
    case D::Capacitance: return "F";
    case D::SpecificResistance: return "ohm_m2";
    }
    return "";
}

bool is_unit_of(std::string_view unit, Dimension d) {
    const std::string u = ascii_unit(unit);
    if (u.empty()) return true;
    if (d == D::Power && u == "dBm") return true;
    const UnitEntry* e = find(u);
    return e != nullptr && e->dimension == d;
}

double to_si(double value, std::string_view unit, Dimension d) {
    const std::string u = ascii_unit(unit);
    if (u.empty()) return value;
    if (d == D::Power && u == "dBm") return 1e-3 * std::pow(10.0, value / 10.0);
    const UnitEntry* e = find(u);
    if (e == nullptr) throw SchemaError("unrecognized unit '" + std::string(unit) + "'");
    if (e->dimension != d) {
        throw SchemaError("unit '" + std::string(unit) + "' is not a " + std::string(to_string(d)) + " unit");
    }
    return value * e->scale;
}

double parse_quantity(std::string_view text, Dimension d) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc()) throw SchemaError("expected a number in '" + std::string(text) + "'");
    std::string_view rest(ptr, static_cast<std::size_t>(text.data() + text.size() - ptr));
    while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    return to_si(value, rest, d);
}

} // namespace scq::units
