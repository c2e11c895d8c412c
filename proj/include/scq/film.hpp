#pragma once

#include <optional>
#include <vector>

namespace scq::film {

struct FilmGeometry {
    double length = 0.0;    ///< m, along the current path
    double width = 0.0;     ///< m
    double thickness = 0.0; ///< m
};

struct RtPoint {
    double temperature = 0.0; ///< K
    double resistance = 0.0;  ///< Ohm
};

/// Resistance-versus-temperature measurement of a film strip.
class RtTrace {
public:
    RtTrace() = default;
    /// Sorts by temperature; throws DomainError for non-positive temperatures.
    explicit RtTrace(std::vector<RtPoint> points, std::optional<FilmGeometry> geometry = std::nullopt);

    [[nodiscard]] const std::vector<RtPoint>& points() const { return points_; }
    [[nodiscard]] const std::optional<FilmGeometry>& geometry() const { return geometry_; }
    /// Linear interpolation; extrapolates from the end segments.
    [[nodiscard]] double resistance_at(double temperature) const;

private:
    std::vector<RtPoint> points_;
    std::optional<FilmGeometry> geometry_;
};

struct TransitionOptions {
    /// Width of the normal-state window above the transition whose median
    /// defines the plateau.
    double plateau_window = 2.0; // K
    std::size_t min_points = 20;
};

struct Transition {
    double tc = 0.0;       ///< K, 50 % plateau crossing
    double tc_width = 0.0; ///< K, 10-90 % width
    double plateau = 0.0;  ///< Ohm
};

struct KineticParameters {
    double sheet_resistance = 0.0;   ///< Ohm per square
    double kinetic_inductance = 0.0; ///< H per square
    double london_depth = 0.0;       ///< m
};

struct FilmReport {
    double tc = 0.0;
    double tc_width = 0.0;
    double rrr = 0.0;
    double delta0 = 0.0; ///< eV, BCS gap from tc
    double delta_tc_from_bulk = 0.0;
    std::optional<double> rho0;
    std::optional<double> sheet_resistance;
    std::optional<double> kinetic_inductance;
    std::optional<double> london_depth;
    /// tc exceeds the bulk reference by more than the allowed tolerance.
    bool above_bulk = false;

    bool operator==(const FilmReport&) const = default;
};

struct FilmOptions {
    TransitionOptions transition;
    double bulk_tc = 9.3;             ///< K
    double bulk_tolerance = 0.05;     ///< K
    double room_temperature = 300.0;  ///< K
    double above_tc_offset = 0.5;     ///< K, where rho(Tc) is read
    double room_window = 5.0;         ///< K, max distance of data from 300 K
};

/// Midpoint of the superconducting transition and its 10-90 % width.
/// Throws AnalysisError when the trace is too short or shows no transition.
[[nodiscard]] Transition extract_tc(const RtTrace& trace, const TransitionOptions& options = {});

/// R(300 K) / R(tc + 0.5 K). Throws AnalysisError naming the missing range.
[[nodiscard]] double residual_ratio(const RtTrace& trace, double tc, const FilmOptions& options = {});

/// Sheet resistance, kinetic sheet inductance hbar R_sq / (pi Delta0) and
/// London depth sqrt(t L_K / mu0).
[[nodiscard]] KineticParameters kinetic_parameters(double rho0, double thickness, double delta0);

/// Full film characterization. Geometry-dependent fields stay empty when the
/// trace has no geometry.
[[nodiscard]] FilmReport analyze(const RtTrace& trace, const FilmOptions& options = {});

} // namespace scq::film
