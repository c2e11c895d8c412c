#include "scq/resonator.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"
#include "scq/physics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace scq::resonator {

namespace {

using cd = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHalfPi = constants::pi / 2.0;

struct Baseline {
    cd offset;
    cd slope;
    double f_center;
    [[nodiscard]] cd at(double f) const { return offset + slope * ((f - f_center) / f_center); }
};

// Complex least-squares line through the outer points of the trace.
Baseline fit_baseline(const ComplexTrace& trace, double fraction) {
    const std::size_t n = trace.size();
    const std::size_t per_side = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * n / 2.0));
    const double f_center = 0.5 * (trace.x.front() + trace.x.back());
    double su = 0.0, suu = 0.0;
    cd sy = 0.0, suy = 0.0;
    double count = 0.0;
    auto add = [&](std::size_t i) {
        const double u = (trace.x[i] - f_center) / f_center;
        su += u;
        suu += u * u;
        sy += trace.y[i];
        suy += u * trace.y[i];
        count += 1.0;
    };
    for (std::size_t i = 0; i < per_side; ++i) add(i);
    for (std::size_t i = n - per_side; i < n; ++i) add(i);
    const double det = count * suu - su * su;
    Baseline b{};
    b.f_center = f_center;
    if (std::abs(det) <= 1e-300) {
        b.offset = sy / count;
        b.slope = 0.0;
    } else {
        b.slope = (count * suy - su * sy) / det;
        b.offset = (sy - b.slope * su) / count;
    }
    return b;
}

double tanh_factor(double f, double t) {
    if (t <= 0.0) return 1.0;
    return std::tanh(constants::planck * f / (2.0 * constants::boltzmann * t));
}

double q_internal_from(double q, double qe, double phi) { return 1.0 / (1.0 / q - std::cos(phi) / qe); }

} // namespace

cd notch_s21(double f, double f0, double q_total, double q_external_mag, double phi) {
    const cd i(0.0, 1.0);
    return 1.0 - (q_total / q_external_mag) * std::exp(i * phi) / (1.0 + 2.0 * i * q_total * (f - f0) / f0);
}

double loaded_q(double q_internal, double q_external_mag, double phi) {
    return 1.0 / (1.0 / q_internal + std::cos(phi) / q_external_mag);
}

ResonatorFit fit_s21(const ComplexTrace& trace, const S21Options& options) {
    const std::size_t n = trace.size();
    if (trace.y.size() != n) throw AnalysisError("S21 trace frequency/value size mismatch");
    if (n < 20) throw AnalysisError("S21 trace needs at least 20 points");
    for (std::size_t i = 1; i < n; ++i) {
        if (!(trace.x[i] > trace.x[i - 1])) throw AnalysisError("S21 frequencies must be strictly increasing");
    }

    const Baseline base = fit_baseline(trace, options.baseline_fraction);
    std::vector<cd> s(n);
    std::vector<double> mag(n);
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = trace.y[i] / base.at(trace.x[i]);
        mag[i] = std::abs(s[i]);
    }

    // Noise floor from the scatter of the baseline region.
    const std::size_t per_side = std::max<std::size_t>(2, static_cast<std::size_t>(options.baseline_fraction * n / 2.0));
    double ss = 0.0;
    for (std::size_t i = 0; i < per_side; ++i) ss += std::norm(s[i] - 1.0) + std::norm(s[n - 1 - i] - 1.0);
    const double noise = std::sqrt(ss / (2.0 * per_side));

    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i == 0 ? 0 : i - 1;
        const std::size_t b = std::min(n - 1, i + 1);
        double acc = 0.0;
        for (std::size_t k = a; k <= b; ++k) acc += mag[k];
        smooth[i] = acc / static_cast<double>(b - a + 1);
    }
    const std::size_t k_min = static_cast<std::size_t>(std::min_element(smooth.begin(), smooth.end()) - smooth.begin());
    const double m_min = smooth[k_min];
    const double depth = 1.0 - m_min;
    if (!(depth > 0.0) || depth < options.min_dip_snr * noise) {
        throw AnalysisError("no resonance dip above 3x the noise floor");
    }

    // -3 dB points: halfway in power between the baseline and the minimum.
    const double level = 0.5 * (1.0 + m_min * m_min);
    auto crossing = [&](bool left) -> std::optional<double> {
        if (left) {
            for (std::size_t i = k_min; i > 0; --i) {
                if (smooth[i - 1] * smooth[i - 1] >= level) {
                    const double a = smooth[i - 1] * smooth[i - 1];
                    const double b = smooth[i] * smooth[i];
                    const double f = (level - b) / (a - b);
                    return trace.x[i] + f * (trace.x[i - 1] - trace.x[i]);
                }
            }
        } else {
            for (std::size_t i = k_min; i + 1 < n; ++i) {
                if (smooth[i + 1] * smooth[i + 1] >= level) {
                    const double a = smooth[i] * smooth[i];
                    const double b = smooth[i + 1] * smooth[i + 1];
                    const double f = (level - a) / (b - a);
                    return trace.x[i] + f * (trace.x[i + 1] - trace.x[i]);
                }
            }
        }
        return std::nullopt;
    };
    const double f0_guess = trace.x[k_min];
    const auto fl = crossing(true);
    const auto fr = crossing(false);
    double fwhm = 0.0;
    if (fl && fr) {
        fwhm = *fr - *fl;
    } else if (fl) {
        fwhm = 2.0 * (f0_guess - *fl);
    } else if (fr) {
        fwhm = 2.0 * (*fr - f0_guess);
    }
    if (!(fwhm > 0.0)) {
        fwhm = 2.0 * (trace.x[std::min(n - 1, k_min + 1)] - trace.x[k_min == 0 ? 0 : k_min - 1]);
    }
    const double q_guess = f0_guess / fwhm;
    const double linewidth = f0_guess / q_guess;
    if ((f0_guess - trace.x.front()) < options.min_linewidths_each_side * linewidth ||
        (trace.x.back() - f0_guess) < options.min_linewidths_each_side * linewidth) {
        throw AnalysisError("S21 trace spans fewer than 3 linewidths on each side of the resonance");
    }
    const double qe_guess = q_guess / std::clamp(depth, 1e-6, 1.5);

    fit::FitProblem problem;
    problem.names = {"f0", "q_total", "q_external_mag", "phi", "gain_re", "gain_im", "slope_re", "slope_im"};
    problem.lower_bounds = {trace.x.front(), 0.0, 0.0, -kHalfPi, -kInf, -kInf, -kInf, -kInf};
    problem.upper_bounds = {trace.x.back(), kInf, kInf, kHalfPi, kInf, kInf, kInf, kInf};
    problem.n_residuals = 2 * n;
    problem.tolerance = 1e-12;
    problem.max_iterations = 500;
    // The final fit runs on the raw trace with the environment modelled as
    // (gain + slope u). Dividing by the outer-point baseline first would leave
    // a residual 1/(linear) factor from resonance tails that no linear
    // correction can absorb.
    const std::vector<double> freqs = trace.x;
    const std::vector<cd> raw = trace.y;
    const double f_center = base.f_center;
    problem.residuals = [freqs, raw, f_center](std::span<const double> p, std::span<double> r) {
        const cd gain(p[4], p[5]);
        const cd slope(p[6], p[7]);
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            const double u = (freqs[i] - f_center) / f_center;
            const cd model = (gain + slope * u) * notch_s21(freqs[i], p[0], p[1], p[2], p[3]);
            const cd d = model - raw[i];
            r[2 * i] = d.real();
            r[2 * i + 1] = d.imag();
        }
    };
    // Analytic derivatives of (gain + slope u) * (1 - a / D) with
    // a = (Q / |Qe|) e^{i phi} and D = 1 + 2 i Q (f - f0) / f0.
    problem.jacobian = [freqs, f_center](std::span<const double> p, std::span<double> jac) {
        const cd i1(0.0, 1.0);
        const cd gain(p[4], p[5]);
        const cd slope(p[6], p[7]);
        const double f0 = p[0], q = p[1], qe = p[2];
        const cd a = (q / qe) * std::exp(i1 * p[3]);
        for (std::size_t k = 0; k < freqs.size(); ++k) {
            const double f = freqs[k];
            const double u = (f - f_center) / f_center;
            const double x = (f - f0) / f0;
            const cd d = 1.0 + 2.0 * i1 * q * x;
            const cd s = 1.0 - a / d;
            const cd env = gain + slope * u;
            const cd a_dd = a / (d * d);
            const cd grads[8] = {
                env * (a_dd * 2.0 * i1 * q * (-f / (f0 * f0))),
                env * (-(a / q) / d + a_dd * 2.0 * i1 * x),
                env * (a / (qe * d)),
                env * (-i1 * a / d),
                s,
                i1 * s,
                u * s,
                i1 * u * s,
            };
            for (std::size_t j = 0; j < 8; ++j) {
                jac[(2 * k) * 8 + j] = grads[j].real();
                jac[(2 * k + 1) * 8 + j] = grads[j].imag();
            }
        }
    };

    fit::FitResult best;
    bool have = false;
    for (double phi0 : {0.0, 0.4, -0.4}) {
        problem.initial_params = {f0_guess, q_guess, qe_guess, phi0, base.offset.real(), base.offset.imag(),
                                  base.slope.real(), base.slope.imag()};
        try {
            fit::FitResult r = fit::fit(problem);
            if (!have || r.chi2 < best.chi2) {
                best = std::move(r);
                have = true;
            }
        } catch (const EvaluationError&) {
        }
    }
    if (!have) throw AnalysisError("S21 fit failed to evaluate from every starting point");

    ResonatorFit out;
    out.f0 = best.params[0];
    out.q_total = best.params[1];
    out.q_external_mag = best.params[2];
    out.phi = best.params[3];
    out.q_internal = q_internal_from(out.q_total, out.q_external_mag, out.phi);

    // First-order propagation of the covariance into Q_i.
    const Eigen::MatrixXd& cov = best.covariance;
    const double qi2 = out.q_internal * out.q_internal;
    Eigen::Vector3d grad;
    grad << qi2 / (out.q_total * out.q_total),
        -qi2 * std::cos(out.phi) / (out.q_external_mag * out.q_external_mag),
        -qi2 * std::sin(out.phi) / out.q_external_mag;
    const Eigen::Matrix3d sub = cov.block<3, 3>(1, 1);
    const double var_qi = grad.dot(sub * grad);
    out.q_internal_uncertainty = std::isfinite(var_qi) ? std::sqrt(std::max(0.0, var_qi)) : kInf;
    out.f0_uncertainty = best.param_uncertainties[0];
    out.q_total_uncertainty = best.param_uncertainties[1];
    out.q_external_uncertainty = best.param_uncertainties[2];
    out.phi_uncertainty = best.param_uncertainties[3];
    out.flagged = best.at_bound[0] || best.at_bound[1] || best.at_bound[2] || best.at_bound[3] ||
                  !(out.q_internal > 0.0) || !best.converged;
    out.result = std::move(best);
    return out;
}

double photon_number(const ResonatorFit& fit, double power_at_chip) {
    if (!(power_at_chip > 0.0)) throw DomainError("power at chip must be positive");
    if (!(fit.q_total > 0.0) || !(fit.q_external_mag > 0.0) || !(fit.f0 > 0.0)) {
        throw DomainError("photon number needs positive fitted Q values and f0");
    }
    const double omega0 = 2.0 * constants::pi * fit.f0;
    return 2.0 * fit.q_total * fit.q_total * power_at_chip / (constants::hbar * omega0 * omega0 * fit.q_external_mag);
}

double tls_loss(double n_ph, double t, double f, const TlsParams& params) {
    if (n_ph < 0.0 || t < 0.0 || !(f > 0.0) || !(params.n_c > 0.0) || params.f_delta0 < 0.0) {
        throw DomainError("tls_loss needs non-negative photon number, temperature, F delta0 and positive f, n_c");
    }
    return params.f_delta0 * tanh_factor(f, t) / std::pow(1.0 + n_ph / params.n_c, params.beta);
}

QiPowerFit fit_qi_vs_power(const std::vector<QiPoint>& points, double t, double f, const QiPowerOptions& options) {
    if (points.size() < 5) {
        throw AnalysisError("Q_i(power) fit needs at least 5 points, got " + std::to_string(points.size()));
    }
    double n_min = kInf, n_max = 0.0;
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.q_i > 0.0)) throw DomainError("photon numbers and Q_i must be positive");
        n_min = std::min(n_min, p.x);
        n_max = std::max(n_max, p.x);
    }
    QiPowerFit out;
    out.rank_warning = std::log10(n_max / n_min) < 2.0;
    const double th = tanh_factor(f, t);

    // Start from a scan over n_c with beta fixed; the remaining parameters
    // enter linearly and are solved in closed form.
    const double beta0 = options.beta;
    double best_cost = kInf;
    double best_nc = std::sqrt(n_min * n_max);
    double best_a = 0.0, best_c = 1.0 / points.front().q_i;
    for (int k = 0; k <= 120; ++k) {
        const double nc = n_min * 1e-2 * std::pow(n_max / n_min * 1e4, k / 120.0);
        Eigen::MatrixXd a(points.size(), 2);
        Eigen::VectorXd b(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double w = points[i].q_i;
            a(static_cast<Eigen::Index>(i), 0) = w * th / std::pow(1.0 + points[i].x / nc, beta0);
            a(static_cast<Eigen::Index>(i), 1) = w;
            b[static_cast<Eigen::Index>(i)] = 1.0;
        }
        Eigen::Vector2d sol = a.colPivHouseholderQr().solve(b);
        sol[0] = std::max(sol[0], 0.0);
        sol[1] = std::max(sol[1], 1e-300);
        const double cost = (a * sol - b).squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best_nc = nc;
            best_a = sol[0];
            best_c = sol[1];
        }
    }
    double loss_min = kInf;
    for (const auto& p : points) loss_min = std::min(loss_min, 1.0 / p.q_i);
    if (!(best_a > 0.0)) best_a = 1e-3 * loss_min;
    if (!(best_c > 0.0)) best_c = 0.5 * loss_min;

    fit::FitProblem problem;
    problem.n_residuals = points.size();
    problem.tolerance = 1e-12;
    problem.max_iterations = 500;
    for (const auto& p : points) problem.weights.push_back(p.q_i * p.q_i);
    const std::vector<QiPoint> pts = points;
    const bool free_beta = options.fit_beta;
    if (free_beta) {
        problem.names = {"f_delta0", "n_c", "beta", "q_other"};
        problem.initial_params = {best_a, best_nc, beta0, 1.0 / best_c};
        problem.lower_bounds = {0.0, 0.0, 0.0, 0.0};
        problem.upper_bounds = {kInf, kInf, 2.0, kInf};
    } else {
        problem.names = {"f_delta0", "n_c", "q_other"};
        problem.initial_params = {best_a, best_nc, 1.0 / best_c};
        problem.lower_bounds = {0.0, 0.0, 0.0};
        problem.upper_bounds = {kInf, kInf, kInf};
    }
    problem.residuals = [pts, th, free_beta, beta0](std::span<const double> p, std::span<double> r) {
        const double beta = free_beta ? p[2] : beta0;
        const double q_other = free_beta ? p[3] : p[2];
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double loss = p[0] * th / std::pow(1.0 + pts[i].x / p[1], beta) + 1.0 / q_other;
            r[i] = loss - 1.0 / pts[i].q_i;
        }
    };
    out.result = fit::fit(problem);
    out.tls.f_delta0 = out.result.params[0];
    out.tls.n_c = out.result.params[1];
    out.tls.beta = free_beta ? out.result.params[2] : beta0;
    out.q_other = free_beta ? out.result.params[3] : out.result.params[2];

    // Model selection: drop the TLS term when its amplitude is consistent
    // with zero or it changes the loss negligibly across the data.
    const double sigma_a = out.result.param_uncertainties[0];
    const double tls_lo = out.tls.f_delta0 * th / std::pow(1.0 + n_min / out.tls.n_c, out.tls.beta);
    const double tls_hi = out.tls.f_delta0 * th / std::pow(1.0 + n_max / out.tls.n_c, out.tls.beta);
    const bool insignificant = !(out.tls.f_delta0 > 2.0 * sigma_a) || (tls_lo - tls_hi) <= 1e-9 * loss_min;
    if (insignificant) {
        out.selected = PowerModel::ConstantOnly;
        double num = 0.0, den = 0.0;
        for (const auto& p : points) {
            const double w = p.q_i * p.q_i;
            num += w / p.q_i;
            den += w;
        }
        out.q_other = den / num;
    }
    return out;
}

double q_sigma(double t, double f, double tc, double alpha, double mb_tolerance) {
    if (!(alpha > 0.0)) return kInf;
    const double delta0 = delta0_from_tc(tc);
    const GapResult gap = gap_vs_temperature(delta0, tc, t);
    if (gap.normal_state) throw DomainError("temperature at or above tc");
    const ComplexConductivityRatio s = mattis_bardeen(f, t, gap.delta, {mb_tolerance});
    if (s.sigma1_over_sigman <= 0.0) return kInf;
    return s.sigma2_over_sigman / (alpha * s.sigma1_over_sigman);
}

namespace {

// sigma1/sigma2 at (t, f) for a film with the given tc.
double conduction_ratio(double t, double f, double tc, double tol) {
    const double delta0 = delta0_from_tc(tc);
    const GapResult gap = gap_vs_temperature(delta0, tc, t);
    if (gap.normal_state) throw DomainError("temperature at or above tc");
    const ComplexConductivityRatio s = mattis_bardeen(f, t, gap.delta, {tol});
    return s.sigma1_over_sigman / s.sigma2_over_sigman;
}

} // namespace

double qi_temperature_model(double t, double f, double tc, double n_ph, double q_other, double f_delta0,
                            double alpha, const QiTemperatureOptions& options) {
    const TlsParams tls{f_delta0, options.n_c, options.beta};
    double loss = 1.0 / q_other + tls_loss(n_ph, t, f, tls);
    if (alpha > 0.0) loss += alpha * conduction_ratio(t, f, tc, options.mb_tolerance);
    return 1.0 / loss;
}

QiTemperatureFit fit_qi_vs_temperature(const std::vector<QiPoint>& points, double f, double tc, double n_ph,
                                       const QiTemperatureOptions& options) {
    if (!(tc > 0.0) || !(f > 0.0) || n_ph < 0.0) throw DomainError("need positive tc and f, non-negative n_ph");
    if (points.size() < 3) throw AnalysisError("Q_i(T) fit needs at least 3 points");
    double t_min = kInf, t_max = 0.0;
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !(p.q_i > 0.0)) throw DomainError("temperatures and Q_i must be positive");
        if (p.x >= tc) throw DomainError("Q_i(T) temperature " + std::to_string(p.x) + " K is not below tc");
        t_min = std::min(t_min, p.x);
        t_max = std::max(t_max, p.x);
    }
    if (t_max < 4.0 * t_min) throw AnalysisError("Q_i(T) points must span at least a factor of 4 in temperature");

    // Temperature-dependent shapes are fixed by tc, so precompute them.
    const std::size_t n = points.size();
    std::vector<double> tls_shape(n), cond(n), loss(n);
    for (std::size_t i = 0; i < n; ++i) {
        tls_shape[i] = tls_loss(n_ph, points[i].x, f, {1.0, options.n_c, options.beta});
        cond[i] = conduction_ratio(points[i].x, f, tc, options.mb_tolerance);
        loss[i] = 1.0 / points[i].q_i;
    }

    // Linear start in (1/Q_other, F delta0, alpha).
    Eigen::MatrixXd a(n, 3);
    Eigen::VectorXd b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double w = points[i].q_i;
        a(ii, 0) = w;
        a(ii, 1) = w * tls_shape[i];
        a(ii, 2) = w * cond[i];
        b[ii] = 1.0;
        if (options.fixed_f_delta0) b[ii] -= w * tls_shape[i] * *options.fixed_f_delta0;
        if (options.fixed_alpha) b[ii] -= w * cond[i] * *options.fixed_alpha;
    }
    std::vector<Eigen::Index> cols{0};
    if (!options.fixed_f_delta0) cols.push_back(1);
    if (!options.fixed_alpha) cols.push_back(2);
    Eigen::MatrixXd a_free(n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) a_free.col(static_cast<Eigen::Index>(c)) = a.col(cols[c]);
    Eigen::VectorXd lin = a_free.colPivHouseholderQr().solve(b);

    double min_loss = *std::min_element(loss.begin(), loss.end());
    fit::FitProblem problem;
    problem.n_residuals = n;
    problem.tolerance = 1e-12;
    problem.max_iterations = 500;
    for (const auto& p : points) problem.weights.push_back(p.q_i * p.q_i);
    problem.names.push_back("q_other");
    problem.initial_params.push_back(1.0 / std::max(lin[0], 0.5 * min_loss));
    problem.lower_bounds.push_back(0.0);
    problem.upper_bounds.push_back(kInf);
    std::size_t k = 1;
    if (!options.fixed_f_delta0) {
        problem.names.push_back("f_delta0");
        problem.initial_params.push_back(std::max(lin[static_cast<Eigen::Index>(k++)], 1e-6 * min_loss));
        problem.lower_bounds.push_back(0.0);
        problem.upper_bounds.push_back(kInf);
    }
    if (!options.fixed_alpha) {
        problem.names.push_back("alpha_kin");
        problem.initial_params.push_back(std::clamp(lin[static_cast<Eigen::Index>(k++)], 1e-8, 0.99));
        problem.lower_bounds.push_back(0.0);
        problem.upper_bounds.push_back(1.0);
    }
    const auto fixed_fd = options.fixed_f_delta0;
    const auto fixed_alpha = options.fixed_alpha;
    problem.residuals = [=](std::span<const double> p, std::span<double> r) {
        std::size_t j = 1;
        const double fd = fixed_fd ? *fixed_fd : p[j++];
        const double al = fixed_alpha ? *fixed_alpha : p[j++];
        for (std::size_t i = 0; i < n; ++i) {
            r[i] = 1.0 / p[0] + fd * tls_shape[i] + al * cond[i] - loss[i];
        }
    };

    QiTemperatureFit out;
    out.result = fit::fit(problem);
    out.q_other = out.result.params[0];
    std::size_t j = 1;
    out.f_delta0 = fixed_fd ? *fixed_fd : out.result.params[j++];
    out.alpha_kin = fixed_alpha ? *fixed_alpha : out.result.params[j++];
    return out;
}

} // namespace scq::resonator
