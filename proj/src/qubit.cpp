#include "scq/qubit.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"
#include "scq/physics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>

namespace scq::qubit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * constants::pi;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be positive and finite");
}

void check_trace(const Trace& trace, std::size_t min_points, const char* what) {
    if (trace.x.size() != trace.y.size()) throw AnalysisError(std::string(what) + ": x/y size mismatch");
    if (trace.size() < min_points) {
        throw AnalysisError(std::string(what) + " needs at least " + std::to_string(min_points) + " points");
    }
    for (double t : trace.x) {
        if (t < 0.0) throw DomainError(std::string(what) + ": delays must be non-negative");
    }
}

double tail_mean(const Trace& trace, double fraction) {
    std::vector<std::size_t> order(trace.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return trace.x[a] < trace.x[b]; });
    const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(fraction * trace.size()));
    double acc = 0.0;
    for (std::size_t i = trace.size() - k; i < trace.size(); ++i) acc += trace.y[order[i]];
    return acc / static_cast<double>(k);
}

DecayFit fit_decay(const Trace& trace, const char* what) {
    check_trace(trace, 10, what);
    std::vector<std::size_t> order(trace.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return trace.x[a] < trace.x[b]; });
    const double span = trace.x[order.back()] - trace.x[order.front()];
    if (!(span > 0.0)) throw AnalysisError(std::string(what) + ": delays do not span a range");

    const double b0 = tail_mean(trace, 0.1);
    const double a0 = trace.y[order.front()] - b0;
    double tau0 = span / 3.0;
    if (a0 != 0.0) {
        for (std::size_t k = 1; k < order.size(); ++k) {
            const double f0 = (trace.y[order[k - 1]] - b0) / a0;
            const double f1 = (trace.y[order[k]] - b0) / a0;
            if (f0 > std::exp(-1.0) && f1 <= std::exp(-1.0)) {
                const double f = (f0 - std::exp(-1.0)) / (f0 - f1);
                const double t = trace.x[order[k - 1]] + f * (trace.x[order[k]] - trace.x[order[k - 1]]);
                tau0 = std::max(t - trace.x[order.front()], span * 1e-3);
                break;
            }
        }
    }

    fit::FitProblem problem;
    problem.names = {"amplitude", "time_constant", "offset"};
    problem.initial_params = {a0, tau0, b0};
    problem.lower_bounds = {-kInf, 0.0, -kInf};
    problem.upper_bounds = {kInf, kInf, kInf};
    problem.tolerance = 1e-13;
    problem.max_iterations = 500;
    problem.n_residuals = trace.size();
    const std::vector<double> xs = trace.x;
    const std::vector<double> ys = trace.y;
    problem.residuals = [xs, ys](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < xs.size(); ++i) r[i] = p[0] * std::exp(-xs[i] / p[1]) + p[2] - ys[i];
    };

    DecayFit out;
    out.result = fit::fit(problem);
    out.amplitude = out.result.params[0];
    out.time_constant = out.result.params[1];
    out.offset = out.result.params[2];
    out.time_constant_uncertainty = out.result.param_uncertainties[1];
    out.unbounded = !std::isfinite(out.time_constant_uncertainty) ||
                    out.time_constant_uncertainty > out.time_constant || out.result.rank_deficient;
    return out;
}

} // namespace

std::vector<double> charge_basis_levels(double ej_over_h, double ec_over_h, int levels,
                                        const ChargeBasisOptions& options) {
    require_positive(ej_over_h, "E_J/h");
    require_positive(ec_over_h, "E_C/h");
    if (options.cutoff < 1) throw DomainError("charge cutoff must be at least 1");
    const int dim = 2 * options.cutoff + 1;
    if (levels < 1 || levels > dim) throw DomainError("requested level count exceeds basis size");
    Eigen::VectorXd diag(dim);
    Eigen::VectorXd off(dim - 1);
    for (int k = 0; k < dim; ++k) {
        const double n = static_cast<double>(k - options.cutoff);
        diag[k] = 4.0 * ec_over_h * (n - options.offset_charge) * (n - options.offset_charge);
    }
    off.setConstant(-0.5 * ej_over_h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = solver.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + levels);
}

Spectrum transmon_spectrum(double ej_over_h, double ec_over_h, SpectrumMode mode, const ChargeBasisOptions& options) {
    require_positive(ej_over_h, "E_J/h");
    require_positive(ec_over_h, "E_C/h");
    Spectrum s;
    s.ej_over_ec = ej_over_h / ec_over_h;
    s.transmon_regime = s.ej_over_ec >= 20.0;
    if (mode == SpectrumMode::Asymptotic) {
        if (s.ej_over_ec < 5.0) {
            throw DomainError("E_J/E_C below 5: asymptotic transmon formulas do not apply, use exact mode");
        }
        s.f01 = std::sqrt(8.0 * ej_over_h * ec_over_h) - ec_over_h;
        s.anharmonicity = -ec_over_h;
        return s;
    }
    const auto e = charge_basis_levels(ej_over_h, ec_over_h, 3, options);
    s.f01 = e[1] - e[0];
    s.anharmonicity = (e[2] - e[1]) - (e[1] - e[0]);
    return s;
}

double charging_energy(double c_sigma) {
    require_positive(c_sigma, "C_sigma");
    const double e = constants::elementary_charge;
    return e * e / (2.0 * c_sigma * constants::planck);
}

TransmonParams transmon_from_design(double c_sigma, const junction::JunctionGeometry& geometry,
                                    const junction::WaferCalibration& cal, const DesignOptions& options) {
    const junction::JunctionPrediction jp = junction::predict_junction(geometry, cal);
    TransmonParams t;
    t.c_sigma = c_sigma;
    t.ec_over_h = charging_energy(c_sigma);
    t.ej_over_h = jp.ej_over_h;
    t.junction_capacitance = options.specific_capacitance * jp.effective_area;
    t.participation_pj = t.junction_capacitance / c_sigma;
    if (!(t.participation_pj < 1.0)) {
        throw DomainError("junction capacitance exceeds total capacitance (p_j >= 1)");
    }
    const Spectrum s = transmon_spectrum(t.ej_over_h, t.ec_over_h, options.mode);
    t.f01 = s.f01;
    t.anharmonicity = s.anharmonicity;
    t.transmon_regime = s.transmon_regime;
    return t;
}

DecayFit fit_t1(const Trace& trace) { return fit_decay(trace, "T1 trace"); }

DecayFit fit_echo(const Trace& trace) { return fit_decay(trace, "echo trace"); }

RamseyFit fit_ramsey(const Trace& trace) {
    check_trace(trace, 20, "Ramsey trace");
    std::vector<std::size_t> order(trace.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return trace.x[a] < trace.x[b]; });
    std::vector<double> t(trace.size()), y(trace.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        t[i] = trace.x[order[i]];
        y[i] = trace.y[order[i]];
    }
    const std::size_t n = t.size();
    const double span = t.back() - t.front();
    if (!(span > 0.0)) throw AnalysisError("Ramsey trace: delays do not span a range");
    const double dt = span / static_cast<double>(n - 1);
    const double b0 = tail_mean(trace, 0.2);

    // Zero-padded discrete spectrum of the offset-removed signal.
    const std::size_t n_freq = 2 * n + 1;
    const double f_nyquist = 0.5 / dt;
    std::vector<double> spec(n_freq);
    std::vector<std::complex<double>> coef(n_freq);
    for (std::size_t k = 0; k < n_freq; ++k) {
        const double f = f_nyquist * static_cast<double>(k) / static_cast<double>(n_freq - 1);
        std::complex<double> acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += (y[i] - b0) * std::polar(1.0, -kTwoPi * f * (t[i] - t.front()));
        }
        coef[k] = acc;
        spec[k] = std::abs(acc);
    }
    const std::size_t k_peak = static_cast<std::size_t>(std::max_element(spec.begin(), spec.end()) - spec.begin());
    std::vector<double> upper(spec.begin() + static_cast<std::ptrdiff_t>(n_freq / 2), spec.end());
    std::nth_element(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(upper.size() / 2), upper.end());
    const double floor = upper[upper.size() / 2];
    const bool fringe = k_peak > 0 && spec[k_peak] >= 3.0 * floor;

    RamseyFit out;
    if (!fringe) {
        const DecayFit d = fit_decay(trace, "Ramsey trace");
        out.no_fringe = true;
        out.t2_star = d.time_constant;
        out.t2_star_uncertainty = d.time_constant_uncertainty;
        out.amplitude = d.amplitude;
        out.offset = d.offset;
        out.result = d.result;
        return out;
    }

    // Parabolic refinement of the peak position.
    double df0 = f_nyquist * static_cast<double>(k_peak) / static_cast<double>(n_freq - 1);
    if (k_peak + 1 < n_freq) {
        const double a = spec[k_peak - 1], b = spec[k_peak], c = spec[k_peak + 1];
        const double denom = a - 2.0 * b + c;
        if (denom < 0.0) {
            const double shift = 0.5 * (a - c) / denom;
            df0 += shift * f_nyquist / static_cast<double>(n_freq - 1);
        }
    }
    const double phase0 = std::arg(coef[k_peak]);
    double a0 = 0.0;
    for (double v : y) a0 = std::max(a0, std::abs(v - b0));

    fit::FitProblem problem;
    problem.names = {"amplitude", "t2_star", "detuning", "phase", "offset"};
    problem.lower_bounds = {-kInf, 0.0, 0.0, -kInf, -kInf};
    problem.upper_bounds = {kInf, kInf, kInf, kInf, kInf};
    problem.tolerance = 1e-13;
    problem.max_iterations = 500;
    problem.n_residuals = n;
    const double t0 = t.front();
    problem.residuals = [t, y, t0](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < t.size(); ++i) {
            const double s = t[i];
            r[i] = p[0] * std::exp(-s / p[1]) * std::cos(kTwoPi * p[2] * s + p[3]) + p[4] - y[i];
        }
    };
    // The spectrum phase refers to t0; shift it to t = 0.
    const double phase_at_zero = phase0 - kTwoPi * df0 * t0;
    fit::FitResult best;
    bool have = false;
    for (double tau0 : {span / 6.0, span / 3.0, span}) {
        problem.initial_params = {a0 * std::exp(t0 / tau0), tau0, df0, phase_at_zero, b0};
        try {
            fit::FitResult r = fit::fit(problem);
            if (!have || r.chi2 < best.chi2) {
                best = std::move(r);
                have = true;
            }
        } catch (const EvaluationError&) {
        }
    }
    if (!have) throw AnalysisError("Ramsey fit failed from every starting point");

    out.amplitude = best.params[0];
    out.t2_star = best.params[1];
    out.detuning = best.params[2];
    out.phase = std::remainder(best.params[3], kTwoPi);
    out.offset = best.params[4];
    if (out.amplitude < 0.0) {
        out.amplitude = -out.amplitude;
        out.phase = std::remainder(out.phase + constants::pi, kTwoPi);
    }
    out.t2_star_uncertainty = best.param_uncertainties[1];
    out.detuning_uncertainty = best.param_uncertainties[2];
    out.result = std::move(best);
    return out;
}

double quality_factor(double f, double time_constant) { return kTwoPi * f * time_constant; }

CoherenceRecord CoherenceRecord::make(double f_q, double t1, double t2_star, double t2_echo, double temperature) {
    require_positive(f_q, "qubit frequency");
    CoherenceRecord r;
    r.f_q = f_q;
    r.t1 = t1;
    r.t2_star = t2_star;
    r.t2_echo = t2_echo;
    r.temperature = temperature;
    r.q1 = quality_factor(f_q, t1);
    r.q2_star = quality_factor(f_q, t2_star);
    r.q2_echo = quality_factor(f_q, t2_echo);
    r.t2_star_exceeds_limit = t2_star > 2.0 * t1;
    r.echo_below_ramsey = t2_echo > 0.0 && t2_echo < t2_star;
    return r;
}

PopulationMeans population_means(const std::vector<CoherenceRecord>& records) {
    if (records.empty()) throw AnalysisError("no coherence records to average");
    PopulationMeans m;
    for (const auto& r : records) {
        m.q1 += r.q1;
        m.q2_star += r.q2_star;
        m.q2_echo += r.q2_echo;
    }
    const double n = static_cast<double>(records.size());
    m.q1 /= n;
    m.q2_star /= n;
    m.q2_echo /= n;
    return m;
}

double budget_model(double p_j, double q_junction, double q_other) {
    return 1.0 / (p_j / q_junction + (1.0 - p_j) / q_other);
}

BudgetFit loss_budget_fit(const std::vector<BudgetPoint>& points) {
    std::vector<double> pjs;
    for (const auto& p : points) {
        if (!(p.p_j >= 0.0 && p.p_j <= 1.0)) throw DomainError("participation ratios must lie in [0, 1]");
        require_positive(p.q1, "Q1");
        pjs.push_back(p.p_j);
    }
    std::sort(pjs.begin(), pjs.end());
    const auto distinct = std::unique(pjs.begin(), pjs.end()) - pjs.begin();
    if (!points.empty() && distinct < 2) {
        throw RankDeficiencyError("loss budget needs at least two distinct participation ratios");
    }
    if (points.size() < 3) throw AnalysisError("loss budget fit needs at least 3 points");

    // Linear start for (1/Q_J, 1/Q_0) with relative weights.
    Eigen::MatrixXd a(points.size(), 2);
    Eigen::VectorXd b(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        a(ii, 0) = points[i].p_j * points[i].q1;
        a(ii, 1) = (1.0 - points[i].p_j) * points[i].q1;
        b[ii] = 1.0;
    }
    const Eigen::Vector2d lin = a.colPivHouseholderQr().solve(b);
    double mean_loss = 0.0;
    for (const auto& p : points) mean_loss += 1.0 / p.q1;
    mean_loss /= static_cast<double>(points.size());

    fit::FitProblem problem;
    problem.names = {"q_junction", "q_other"};
    problem.initial_params = {1.0 / std::max(lin[0], 1e-3 * mean_loss), 1.0 / std::max(lin[1], 1e-3 * mean_loss)};
    problem.lower_bounds = {0.0, 0.0};
    problem.upper_bounds = {kInf, kInf};
    problem.tolerance = 1e-13;
    problem.n_residuals = points.size();
    for (const auto& p : points) problem.weights.push_back(p.q1 * p.q1);
    problem.residuals = [points](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            r[i] = points[i].p_j / p[0] + (1.0 - points[i].p_j) / p[1] - 1.0 / points[i].q1;
        }
    };
    BudgetFit out;
    out.result = fit::fit(problem);
    out.q_junction = out.result.params[0];
    out.q_other = out.result.params[1];
    return out;
}

std::vector<BandPoint> budget_band(const BudgetFit& fit, const std::vector<double>& p_j, double level) {
    const double z = fit::normal_quantile_two_sided(level);
    const Eigen::MatrixXd& cov = fit.result.covariance;
    std::vector<BandPoint> out;
    for (double p : p_j) {
        const double q = budget_model(p, fit.q_junction, fit.q_other);
        Eigen::Vector2d g;
        g << q * q * p / (fit.q_junction * fit.q_junction),
            q * q * (1.0 - p) / (fit.q_other * fit.q_other);
        const double var = g.dot(cov * g);
        const double sigma = std::isfinite(var) ? std::sqrt(std::max(0.0, var)) : kInf;
        out.push_back({p, q, q - z * sigma, q + z * sigma});
    }
    return out;
}

double quasiparticle_q(double f_q, double t, double delta) {
    require_positive(f_q, "qubit frequency");
    require_positive(delta, "delta");
    if (t < 0.0) throw DomainError("temperature must be non-negative");
    if (t == 0.0) return kInf;
    const double x = quasiparticle_density(t, delta);
    if (x == 0.0) return kInf;
    return constants::pi / x * std::sqrt(units::hz_to_ev(f_q) / (2.0 * delta));
}

double quasiparticle_onset(double f_q, double delta, double q_target) {
    require_positive(q_target, "target Q");
    double lo = 1e-4;
    double hi = delta / constants::boltzmann_ev;
    if (quasiparticle_q(f_q, hi, delta) > q_target) {
        throw AnalysisError("quasiparticle Q stays above target up to T = Delta / k_B");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        if (quasiparticle_q(f_q, mid, delta) > q_target) lo = mid; else hi = mid;
        if (hi / lo - 1.0 < 1e-14) break;
    }
    return std::sqrt(lo * hi);
}

std::vector<QCurvePoint> q_vs_temperature_model(const std::vector<double>& temperatures, const BathModel& model) {
    require_positive(model.q1_zero, "Q1(0)");
    require_positive(model.f_q, "qubit frequency");
    require_positive(model.delta, "delta");
    const double tc = tc_from_delta0(model.delta);
    std::vector<QCurvePoint> out;
    for (double t : temperatures) {
        if (t < 0.0 || t >= tc) throw DomainError("model temperatures must lie in [0, tc)");
        QCurvePoint p;
        p.temperature = t;
        p.q_bath = t == 0.0 ? model.q1_zero
                            : model.q1_zero * std::tanh(constants::planck * model.f_q / (2.0 * constants::boltzmann * t));
        p.q_qp = quasiparticle_q(model.f_q, t, model.delta);
        p.q_total = 1.0 / (1.0 / p.q_bath + (std::isfinite(p.q_qp) ? 1.0 / p.q_qp : 0.0));
        out.push_back(p);
    }
    return out;
}

} // namespace scq::qubit
