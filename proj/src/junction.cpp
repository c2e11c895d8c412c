#include "scq/junction.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace scq::junction {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

} // namespace

std::string_view to_string(SpacerProcess process) {
    return process == SpacerProcess::PECVD ? "PECVD" : "HDPCVD";
}

SpacerProcess spacer_process_from_string(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "PECVD") return SpacerProcess::PECVD;
    if (upper == "HDPCVD") return SpacerProcess::HDPCVD;
    throw std::invalid_argument("unknown spacer process '" + std::string(name) + "'");
}

double JunctionGeometry::effective_width() const {
    const double w = design_width - dimension_bias;
    if (!(w > 0.0)) {
        std::ostringstream os;
        os << "effective junction width is non-positive (design width " << design_width << " m, bias "
           << dimension_bias << " m)";
        throw GeometryError(os.str());
    }
    return w;
}

double JunctionGeometry::effective_height() const {
    const double h = design_height - dimension_bias;
    if (!(h > 0.0)) {
        std::ostringstream os;
        os << "effective junction height is non-positive (design height " << design_height << " m, bias "
           << dimension_bias << " m)";
        throw GeometryError(os.str());
    }
    return h;
}

double JunctionGeometry::effective_area() const { return effective_width() * effective_height(); }

WaferCalibration WaferCalibration::make(std::string wafer_id, double specific_resistance,
                                        double dimension_bias, double icrn_product,
                                        double oxidation_exposure, SpacerProcess process, double tc) {
    WaferCalibration cal;
    cal.wafer_id = std::move(wafer_id);
    cal.specific_resistance = specific_resistance;
    cal.dimension_bias = dimension_bias;
    cal.icrn_product = icrn_product;
    cal.jc = jc_from_calibration(specific_resistance, icrn_product);
    cal.oxidation_exposure = oxidation_exposure;
    cal.spacer_process = process;
    cal.tc = tc;
    cal.validate();
    return cal;
}

void WaferCalibration::validate() const {
    require_positive(specific_resistance, "specific_resistance");
    require_positive(icrn_product, "icrn_product");
    if (dimension_bias < 0.0) throw DomainError("dimension_bias must be non-negative");
    if (oxidation_exposure < 0.0) throw DomainError("oxidation_exposure must be non-negative");
    const double expected = icrn_product / specific_resistance;
    if (!(std::abs(jc - expected) <= 1e-9 * expected)) {
        throw DomainError("calibration jc is inconsistent with icrn_product / specific_resistance");
    }
}

double ab_icrn(double delta, double t) {
    require_positive(delta, "delta");
    if (t < 0.0) throw DomainError("temperature must be non-negative");
    // delta in eV divided by e gives volts directly.
    const double zero_t = constants::pi * delta / 2.0;
    if (t == 0.0) return zero_t;
    return zero_t * std::tanh(delta / (2.0 * constants::boltzmann_ev * t));
}

double icrn_suppression(double measured_product, double delta, double t) {
    require_positive(measured_product, "measured product");
    return measured_product / ab_icrn(delta, t);
}

double ic_from_rn(double rn, double icrn_product) {
    require_positive(rn, "rn");
    return icrn_product / rn;
}

double josephson_inductance(double ic) {
    require_positive(ic, "ic");
    return constants::flux_quantum / (2.0 * constants::pi * ic);
}

double jc_from_calibration(double specific_resistance, double icrn_product) {
    require_positive(specific_resistance, "specific_resistance");
    require_positive(icrn_product, "icrn_product");
    return icrn_product / specific_resistance;
}

AreaFit fit_area_scaling(const std::vector<AreaSample>& samples) {
    std::set<double> areas;
    double min_dim = kInf;
    for (const auto& s : samples) {
        require_positive(s.design_width, "design_width");
        require_positive(s.design_height, "design_height");
        require_positive(s.resistance, "resistance");
        areas.insert(s.design_width * s.design_height);
        min_dim = std::min({min_dim, s.design_width, s.design_height});
    }
    if (!samples.empty() && areas.size() < 2) {
        throw RankDeficiencyError("all junction samples share one area; bias and specific resistance are degenerate");
    }
    if (samples.size() < 4) {
        throw AnalysisError("area scaling fit needs at least 4 samples, got " + std::to_string(samples.size()));
    }

    auto weighted_rho = [&](double d) {
        // Closed-form rho for fixed d under relative residuals.
        double num = 0.0;
        double den = 0.0;
        for (const auto& s : samples) {
            const double x = 1.0 / ((s.design_width - d) * (s.design_height - d));
            num += x / s.resistance;
            den += x * x / (s.resistance * s.resistance);
        }
        return num / den;
    };
    auto cost = [&](double d) {
        const double rho = weighted_rho(d);
        double c = 0.0;
        for (const auto& s : samples) {
            const double model = rho / ((s.design_width - d) * (s.design_height - d));
            c += std::pow(model / s.resistance - 1.0, 2);
        }
        return c;
    };
    double best_d = 0.0;
    double best_cost = cost(0.0);
    for (int k = 1; k < 200; ++k) {
        const double d = 0.95 * min_dim * k / 200.0;
        const double c = cost(d);
        if (c < best_cost) {
            best_cost = c;
            best_d = d;
        }
    }

    fit::FitProblem problem;
    problem.names = {"specific_resistance", "dimension_bias"};
    problem.initial_params = {weighted_rho(best_d), best_d};
    problem.lower_bounds = {0.0, 0.0};
    problem.upper_bounds = {kInf, min_dim};
    problem.n_residuals = samples.size();
    problem.weights.reserve(samples.size());
    for (const auto& s : samples) problem.weights.push_back(1.0 / (s.resistance * s.resistance));
    problem.residuals = [samples](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            r[i] = p[0] / ((s.design_width - p[1]) * (s.design_height - p[1])) - s.resistance;
        }
    };
    problem.tolerance = 1e-12;

    AreaFit out;
    out.result = fit::fit(problem);
    out.specific_resistance = out.result.params[0];
    out.dimension_bias = out.result.params[1];
    out.resistance_spread = out.result.residual_norm / std::sqrt(static_cast<double>(samples.size()));
    return out;
}

ExposureFit fit_exposure_law(const std::vector<ExposurePoint>& points, std::optional<double> fix_exponent) {
    std::set<double> exposures;
    for (const auto& p : points) {
        if (!(p.exposure > 0.0) || !(p.jc > 0.0)) {
            throw DomainError("exposure and jc must be positive for the power-law fit");
        }
        exposures.insert(p.exposure);
    }
    if (!fix_exponent && exposures.size() < 2) {
        throw RankDeficiencyError("exponent is undetermined: fewer than two distinct exposures");
    }
    if (points.size() < 3) {
        throw AnalysisError("exposure fit needs at least 3 points, got " + std::to_string(points.size()));
    }

    std::vector<double> log_e;
    std::vector<double> log_j;
    for (const auto& p : points) {
        log_e.push_back(std::log(p.exposure));
        log_j.push_back(std::log(p.jc));
    }
    // Closed-form start from ordinary regression on the logs.
    const double n = static_cast<double>(points.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        sx += log_e[i];
        sy += log_j[i];
        sxx += log_e[i] * log_e[i];
        sxy += log_e[i] * log_j[i];
    }
    const double slope0 = fix_exponent ? *fix_exponent : (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double intercept0 = (sy - slope0 * sx) / n;

    fit::FitProblem problem;
    problem.n_residuals = points.size();
    problem.tolerance = 1e-13;
    if (fix_exponent) {
        const double p_fixed = *fix_exponent;
        problem.names = {"log_prefactor"};
        problem.initial_params = {intercept0};
        problem.residuals = [log_e, log_j, p_fixed](std::span<const double> q, std::span<double> r) {
            for (std::size_t i = 0; i < log_e.size(); ++i) r[i] = q[0] + p_fixed * log_e[i] - log_j[i];
        };
    } else {
        problem.names = {"log_prefactor", "exponent"};
        problem.initial_params = {intercept0, slope0};
        problem.residuals = [log_e, log_j](std::span<const double> q, std::span<double> r) {
            for (std::size_t i = 0; i < log_e.size(); ++i) r[i] = q[0] + q[1] * log_e[i] - log_j[i];
        };
    }

    ExposureFit out;
    out.result = fit::fit(problem);
    out.prefactor = std::exp(out.result.params[0]);
    out.prefactor_uncertainty = out.prefactor * out.result.param_uncertainties[0];
    out.exponent = fix_exponent ? *fix_exponent : out.result.params[1];
    out.exponent_uncertainty = fix_exponent ? 0.0 : out.result.param_uncertainties[1];
    return out;
}

GroupedExposureFit fit_exposure_law_grouped(
    const std::vector<std::pair<std::string, std::vector<ExposurePoint>>>& groups,
    std::optional<double> fix_exponent) {
    if (groups.empty()) throw AnalysisError("no exposure groups supplied");
    std::vector<std::size_t> group_of;
    std::vector<double> log_e;
    std::vector<double> log_j;
    std::set<double> exposures;
    GroupedExposureFit out;
    std::vector<double> init;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        out.groups.push_back(groups[g].first);
        if (groups[g].second.empty()) throw AnalysisError("exposure group '" + groups[g].first + "' is empty");
        double mean = 0.0;
        for (const auto& p : groups[g].second) {
            if (!(p.exposure > 0.0) || !(p.jc > 0.0)) throw DomainError("exposure and jc must be positive");
            group_of.push_back(g);
            log_e.push_back(std::log(p.exposure));
            log_j.push_back(std::log(p.jc));
            exposures.insert(p.exposure);
            mean += std::log(p.jc) - (fix_exponent ? *fix_exponent : -0.5) * std::log(p.exposure);
        }
        init.push_back(mean / static_cast<double>(groups[g].second.size()));
    }
    if (!fix_exponent && exposures.size() < 2) {
        throw RankDeficiencyError("shared exponent is undetermined: fewer than two distinct exposures");
    }
    const std::size_t ng = groups.size();
    fit::FitProblem problem;
    problem.n_residuals = log_e.size();
    problem.tolerance = 1e-13;
    for (const auto& name : out.groups) problem.names.push_back("log_prefactor_" + name);
    problem.initial_params = init;
    if (!fix_exponent) {
        problem.names.push_back("exponent");
        problem.initial_params.push_back(-0.5);
    }
    const double fixed = fix_exponent.value_or(0.0);
    const bool free_exp = !fix_exponent;
    problem.residuals = [=](std::span<const double> q, std::span<double> r) {
        const double p = free_exp ? q[ng] : fixed;
        for (std::size_t i = 0; i < log_e.size(); ++i) r[i] = q[group_of[i]] + p * log_e[i] - log_j[i];
    };
    out.result = fit::fit(problem);
    for (std::size_t g = 0; g < ng; ++g) out.prefactors.push_back(std::exp(out.result.params[g]));
    out.exponent = free_exp ? out.result.params[ng] : fixed;
    return out;
}

double anneal_model(double time, double alpha, double tau) {
    return (1.0 - alpha) * std::exp(-time / tau) + alpha;
}

AnnealFit fit_annealing(const std::vector<AnnealPoint>& points) {
    for (const auto& p : points) {
        if (!(p.jc_ratio > 0.0) || p.jc_ratio > 1.0) {
            throw DomainError("annealing J_c ratios must lie in (0, 1]");
        }
        if (p.time < 0.0) throw DomainError("anneal times must be non-negative");
    }
    if (points.size() < 3) {
        throw AnalysisError("annealing fit needs at least 3 points, got " + std::to_string(points.size()));
    }
    std::vector<AnnealPoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const AnnealPoint& a, const AnnealPoint& b) { return a.time < b.time; });

    const double alpha0 = std::clamp(sorted.back().jc_ratio * 0.9, 1e-4, 0.9);
    // Time at which the decay is half done.
    const double half = 0.5 * (1.0 + alpha0);
    double tau0 = 0.5 * (sorted.back().time + sorted.front().time);
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i].jc_ratio <= half && sorted[i - 1].jc_ratio > half) {
            tau0 = std::max(sorted[i].time / std::log(2.0), 1e-9);
            break;
        }
    }
    if (sorted.front().jc_ratio <= half && sorted.front().time > 0.0) {
        // Already past half-way at the first sample: back out tau from it.
        const double frac = (sorted.front().jc_ratio - alpha0) / (1.0 - alpha0);
        if (frac > 0.0 && frac < 1.0) tau0 = -sorted.front().time / std::log(frac);
    }
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) tau0 = std::max(sorted.back().time, 1.0);

    fit::FitProblem problem;
    problem.names = {"alpha", "tau"};
    problem.initial_params = {alpha0, tau0};
    problem.lower_bounds = {0.0, 0.0};
    problem.upper_bounds = {1.0, kInf};
    problem.n_residuals = sorted.size();
    problem.tolerance = 1e-12;
    for (const auto& p : sorted) problem.weights.push_back(1.0 / (p.jc_ratio * p.jc_ratio));
    problem.residuals = [sorted](std::span<const double> q, std::span<double> r) {
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            r[i] = anneal_model(sorted[i].time, q[0], q[1]) - sorted[i].jc_ratio;
        }
    };
    AnnealFit out;
    out.result = fit::fit(problem);
    out.alpha = out.result.params[0];
    out.tau = out.result.params[1];
    return out;
}

JunctionPrediction predict_junction(const JunctionGeometry& geometry, const WaferCalibration& cal) {
    cal.validate();
    JunctionPrediction out;
    out.effective_area = geometry.effective_area();
    out.rn = cal.specific_resistance / out.effective_area;
    out.ic = ic_from_rn(out.rn, cal.icrn_product);
    out.l_j = josephson_inductance(out.ic);
    out.ej_over_h = out.ic * constants::flux_quantum / (2.0 * constants::pi * constants::planck);
    return out;
}

} // namespace scq::junction
