#include "scq/film.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"
#include "scq/physics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace scq::film {

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double plateau_above(const std::vector<RtPoint>& pts, double t_start, double window) {
    std::vector<double> r;
    for (const auto& p : pts) {
        if (p.temperature > t_start && p.temperature <= t_start + window) r.push_back(p.resistance);
    }
    if (r.empty()) {
        // Sparse data: fall back to the next point above.
        for (const auto& p : pts) {
            if (p.temperature > t_start) return p.resistance;
        }
        return std::nan("");
    }
    return median(std::move(r));
}

// First upward crossing of `level`, linearly interpolated.
std::optional<double> first_crossing(const std::vector<RtPoint>& pts, double level) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].resistance >= level && pts[i - 1].resistance < level) {
            const auto& a = pts[i - 1];
            const auto& b = pts[i];
            const double f = (level - a.resistance) / (b.resistance - a.resistance);
            return a.temperature + f * (b.temperature - a.temperature);
        }
    }
    return std::nullopt;
}

} // namespace

RtTrace::RtTrace(std::vector<RtPoint> points, std::optional<FilmGeometry> geometry)
    : points_(std::move(points)), geometry_(geometry) {
    for (const auto& p : points_) {
        if (!(p.temperature > 0.0)) throw DomainError("R(T) temperatures must be positive");
    }
    std::stable_sort(points_.begin(), points_.end(),
                     [](const RtPoint& a, const RtPoint& b) { return a.temperature < b.temperature; });
    if (geometry_) {
        if (!(geometry_->length > 0.0 && geometry_->width > 0.0 && geometry_->thickness > 0.0)) {
            throw DomainError("film geometry dimensions must be positive");
        }
    }
}

double RtTrace::resistance_at(double temperature) const {
    if (points_.size() < 2) throw AnalysisError("need at least two R(T) points to interpolate");
    auto it = std::lower_bound(points_.begin(), points_.end(), temperature,
                               [](const RtPoint& p, double t) { return p.temperature < t; });
    std::size_t hi = static_cast<std::size_t>(it - points_.begin());
    hi = std::clamp<std::size_t>(hi, 1, points_.size() - 1);
    const auto& a = points_[hi - 1];
    const auto& b = points_[hi];
    if (b.temperature == a.temperature) return 0.5 * (a.resistance + b.resistance);
    const double f = (temperature - a.temperature) / (b.temperature - a.temperature);
    return a.resistance + f * (b.resistance - a.resistance);
}

Transition extract_tc(const RtTrace& trace, const TransitionOptions& options) {
    const auto& pts = trace.points();
    if (pts.size() < options.min_points) {
        throw AnalysisError("R(T) trace has " + std::to_string(pts.size()) + " points, need at least " +
                            std::to_string(options.min_points));
    }

    // Locate the transition as the first point reaching half of the plateau
    // that follows it.
    std::optional<std::size_t> edge;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double plateau = plateau_above(pts, pts[i].temperature, options.plateau_window);
        if (std::isfinite(plateau) && plateau > 0.0 && pts[i].resistance >= 0.5 * plateau &&
            pts[i - 1].resistance < 0.5 * plateau) {
            edge = i;
            break;
        }
    }
    if (!edge) throw AnalysisError("no superconducting transition found in R(T) trace");

    const double plateau = plateau_above(pts, pts[*edge].temperature, options.plateau_window);
    const double r_min = std::min_element(pts.begin(), pts.end(), [](const RtPoint& a, const RtPoint& b) {
                             return a.resistance < b.resistance;
                         })->resistance;
    if (!(r_min < 0.05 * plateau)) {
        throw AnalysisError("R(T) trace does not reach the superconducting state (min R not below 5% of plateau)");
    }

    const auto t50 = first_crossing(pts, 0.5 * plateau);
    const auto t10 = first_crossing(pts, 0.1 * plateau);
    const auto t90 = first_crossing(pts, 0.9 * plateau);
    if (!t50 || !t10 || !t90) throw AnalysisError("no 50% crossing of the normal-state plateau");

    return {*t50, std::max(0.0, *t90 - *t10), plateau};
}

double residual_ratio(const RtTrace& trace, double tc, const FilmOptions& options) {
    const auto& pts = trace.points();
    if (pts.size() < 2) throw AnalysisError("R(T) trace too short for RRR");
    const double t_room = options.room_temperature;
    const double t_low = tc + options.above_tc_offset;
    const double t_max = pts.back().temperature;
    const double t_min = pts.front().temperature;
    if (t_max < t_room - options.room_window) {
        std::ostringstream os;
        os << "R(T) trace is missing the " << t_room - options.room_window << "-" << t_room
           << " K range needed for RRR (max T = " << t_max << " K)";
        throw AnalysisError(os.str());
    }
    if (t_low < t_min || t_low > t_max) {
        std::ostringstream os;
        os << "R(T) trace does not cover T = " << t_low << " K just above Tc";
        throw AnalysisError(os.str());
    }
    const double r_low = trace.resistance_at(t_low);
    if (!(r_low > 0.0)) throw AnalysisError("resistance just above Tc is not positive");
    return trace.resistance_at(t_room) / r_low;
}

KineticParameters kinetic_parameters(double rho0, double thickness, double delta0) {
    if (!(rho0 > 0.0) || !(thickness > 0.0) || !(delta0 > 0.0)) {
        throw DomainError("rho0, thickness and delta0 must be positive");
    }
    KineticParameters k;
    k.sheet_resistance = rho0 / thickness;
    k.kinetic_inductance = constants::hbar * k.sheet_resistance / (constants::pi * units::ev_to_joule(delta0));
    k.london_depth = std::sqrt(thickness * k.kinetic_inductance / constants::mu0);
    return k;
}

FilmReport analyze(const RtTrace& trace, const FilmOptions& options) {
    const Transition tr = extract_tc(trace, options.transition);
    FilmReport report;
    report.tc = tr.tc;
    report.tc_width = tr.tc_width;
    report.rrr = residual_ratio(trace, tr.tc, options);
    report.delta0 = delta0_from_tc(tr.tc);
    report.delta_tc_from_bulk = options.bulk_tc - tr.tc;
    report.above_bulk = report.delta_tc_from_bulk < -options.bulk_tolerance;
    if (const auto& g = trace.geometry()) {
        const double r_low = trace.resistance_at(tr.tc + options.above_tc_offset);
        const double rho0 = r_low * g->width * g->thickness / g->length;
        const KineticParameters k = kinetic_parameters(rho0, g->thickness, report.delta0);
        report.rho0 = rho0;
        report.sheet_resistance = k.sheet_resistance;
        report.kinetic_inductance = k.kinetic_inductance;
        report.london_depth = k.london_depth;
    }
    return report;
}

} // namespace scq::film
