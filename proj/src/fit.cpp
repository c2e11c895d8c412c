#include "scq/fit.hpp"

#include "scq/errors.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace scq::fit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kFdStep = 1e-6;

enum class BoundKind { None, Lower, Upper, Both };

// Maps between the optimizer's unconstrained coordinates and the user's
// bounded parameters.
struct Transform {
    std::vector<BoundKind> kinds;
    std::vector<double> lo;
    std::vector<double> hi;

    explicit Transform(const FitProblem& problem) {
        const std::size_t n = problem.n_params();
        kinds.resize(n);
        lo.assign(n, -kInf);
        hi.assign(n, kInf);
        for (std::size_t i = 0; i < n; ++i) {
            if (!problem.lower_bounds.empty()) lo[i] = problem.lower_bounds[i];
            if (!problem.upper_bounds.empty()) hi[i] = problem.upper_bounds[i];
            const bool has_lo = std::isfinite(lo[i]);
            const bool has_hi = std::isfinite(hi[i]);
            kinds[i] = has_lo && has_hi ? BoundKind::Both
                       : has_lo         ? BoundKind::Lower
                       : has_hi         ? BoundKind::Upper
                                        : BoundKind::None;
        }
    }

    [[nodiscard]] double to_external(std::size_t i, double q) const {
        switch (kinds[i]) {
        case BoundKind::None: return q;
        case BoundKind::Lower: return lo[i] + std::exp(q);
        case BoundKind::Upper: return hi[i] - std::exp(q);
        case BoundKind::Both: return lo[i] + (hi[i] - lo[i]) / (1.0 + std::exp(-q));
        }
        return q;
    }

    [[nodiscard]] double to_internal(std::size_t i, double p) const {
        // Values on a bound are nudged inside so the inverse map is finite.
        switch (kinds[i]) {
        case BoundKind::None: return p;
        case BoundKind::Lower: {
            const double gap = p - lo[i];
            return std::log(gap > 0.0 ? gap : std::max(std::abs(lo[i]), 1.0) * 1e-12);
        }
        case BoundKind::Upper: {
            const double gap = hi[i] - p;
            return std::log(gap > 0.0 ? gap : std::max(std::abs(hi[i]), 1.0) * 1e-12);
        }
        case BoundKind::Both: {
            const double width = hi[i] - lo[i];
            double s = (p - lo[i]) / width;
            s = std::clamp(s, 1e-9, 1.0 - 1e-9);
            return std::log(s / (1.0 - s));
        }
        }
        return p;
    }

    [[nodiscard]] std::vector<double> external(const Eigen::VectorXd& q) const {
        std::vector<double> p(static_cast<std::size_t>(q.size()));
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = to_external(i, q[static_cast<Eigen::Index>(i)]);
        return p;
    }

    [[nodiscard]] bool near_bound(std::size_t i, double p) const {
        const double scale = std::isfinite(hi[i] - lo[i]) ? (hi[i] - lo[i]) : std::max(std::abs(p), 1.0);
        const double tol = 1e-6 * scale;
        return (std::isfinite(lo[i]) && p - lo[i] <= tol) || (std::isfinite(hi[i]) && hi[i] - p <= tol);
    }
};

class Evaluator {
public:
    Evaluator(const FitProblem& problem) : problem_(problem) {
        sqrt_w_.resize(static_cast<Eigen::Index>(problem.n_residuals));
        for (std::size_t i = 0; i < problem.n_residuals; ++i) {
            sqrt_w_[static_cast<Eigen::Index>(i)] = problem.weights.empty() ? 1.0 : std::sqrt(problem.weights[i]);
        }
    }

    // Weighted residuals; returns false on non-finite output.
    bool residuals(std::span<const double> p, Eigen::VectorXd& out) {
        out.resize(static_cast<Eigen::Index>(problem_.n_residuals));
        problem_.residuals(p, std::span<double>(out.data(), problem_.n_residuals));
        ++evaluations;
        out.array() *= sqrt_w_.array();
        return out.allFinite();
    }

    // Weighted Jacobian with respect to the external parameters.
    bool jacobian(std::span<const double> p, std::span<const double> typical, Eigen::MatrixXd& jac) {
        const auto n = static_cast<Eigen::Index>(problem_.n_residuals);
        const auto m = static_cast<Eigen::Index>(p.size());
        jac.resize(n, m);
        if (problem_.jacobian) {
            std::vector<double> buffer(static_cast<std::size_t>(n * m));
            problem_.jacobian(p, buffer);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < m; ++j)
                    jac(i, j) = buffer[static_cast<std::size_t>(i * m + j)] * sqrt_w_[i];
            return jac.allFinite();
        }
        std::vector<double> work(p.begin(), p.end());
        Eigen::VectorXd plus;
        Eigen::VectorXd minus;
        for (Eigen::Index j = 0; j < m; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            double scale = std::max(std::abs(p[ju]), std::abs(typical[ju]));
            if (scale == 0.0) scale = 1.0;
            const double h = kFdStep * scale;
            work[ju] = p[ju] + h;
            if (!residuals(work, plus)) return false;
            work[ju] = p[ju] - h;
            if (!residuals(work, minus)) return false;
            work[ju] = p[ju];
            jac.col(j) = (plus - minus) / (2.0 * h);
        }
        return true;
    }

    int evaluations = 0;

private:
    const FitProblem& problem_;
    Eigen::VectorXd sqrt_w_;
};

std::string describe(const std::vector<std::string>& names, std::span<const double> p) {
    std::ostringstream os;
    os.precision(10);
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        os << (i < names.size() && !names[i].empty() ? names[i] : "p" + std::to_string(i)) << "=" << p[i];
    }
    return os.str();
}

} // namespace

void FitProblem::validate() const {
    const std::size_t m = n_params();
    if (!residuals) throw std::invalid_argument("fit problem has no residual function");
    if (m == 0) throw std::invalid_argument("fit problem has no parameters");
    if (n_residuals < m) {
        throw std::invalid_argument("fewer data points (" + std::to_string(n_residuals) +
                                    ") than free parameters (" + std::to_string(m) + ")");
    }
    if (!names.empty() && names.size() != m) throw std::invalid_argument("names size mismatch");
    if (!lower_bounds.empty() && lower_bounds.size() != m) throw std::invalid_argument("lower_bounds size mismatch");
    if (!upper_bounds.empty() && upper_bounds.size() != m) throw std::invalid_argument("upper_bounds size mismatch");
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = lower_bounds.empty() ? -kInf : lower_bounds[i];
        const double hi = upper_bounds.empty() ? kInf : upper_bounds[i];
        if (!(lo < hi)) throw std::invalid_argument("empty bound interval for parameter " + std::to_string(i));
        if (initial_params[i] < lo || initial_params[i] > hi || std::isnan(initial_params[i])) {
            throw std::invalid_argument("initial parameter " + std::to_string(i) + " outside bounds");
        }
    }
    if (!weights.empty()) {
        if (weights.size() != n_residuals) throw std::invalid_argument("weights size mismatch");
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) throw std::invalid_argument("weights must be positive");
        }
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    if (max_iterations <= 0) throw std::invalid_argument("max_iterations must be positive");
}

std::size_t FitResult::index(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw std::out_of_range("no fit parameter named " + std::string(name));
}

double FitResult::param(std::string_view name) const { return params[index(name)]; }

double FitResult::uncertainty(std::string_view name) const { return param_uncertainties[index(name)]; }

bool FitResult::any_at_bound() const {
    return std::any_of(at_bound.begin(), at_bound.end(), [](bool b) { return b; });
}

FitResult fit(const FitProblem& problem) {
    problem.validate();
    const std::size_t m = problem.n_params();
    const auto me = static_cast<Eigen::Index>(m);
    const Transform transform(problem);
    Evaluator eval(problem);

    Eigen::VectorXd q(me);
    for (std::size_t i = 0; i < m; ++i) q[static_cast<Eigen::Index>(i)] = transform.to_internal(i, problem.initial_params[i]);

    std::vector<double> p = transform.external(q);
    Eigen::VectorXd r;
    if (!eval.residuals(p, r)) {
        throw EvaluationError("model is not finite at initial parameters (" + describe(problem.names, p) + ")");
    }
    double chi2 = r.squaredNorm();

    // Internal-space Jacobian: chain rule through the bound transform, with
    // the finite-difference step taken in external space.
    auto internal_jacobian = [&](const Eigen::VectorXd& qv, const std::vector<double>& pv, Eigen::MatrixXd& jac) {
        if (!eval.jacobian(pv, problem.initial_params, jac)) return false;
        for (std::size_t j = 0; j < m; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            double dpdq = 1.0;
            switch (transform.kinds[j]) {
            case BoundKind::None: dpdq = 1.0; break;
            case BoundKind::Lower: dpdq = pv[j] - transform.lo[j]; break;
            case BoundKind::Upper: dpdq = -(transform.hi[j] - pv[j]); break;
            case BoundKind::Both: {
                const double s = 1.0 / (1.0 + std::exp(-qv[jj]));
                dpdq = (transform.hi[j] - transform.lo[j]) * s * (1.0 - s);
                break;
            }
            }
            jac.col(jj) *= dpdq;
        }
        return true;
    };

    Eigen::MatrixXd jac;
    if (!internal_jacobian(q, p, jac)) {
        throw EvaluationError("Jacobian is not finite at initial parameters (" + describe(problem.names, p) + ")");
    }

    FitResult result;
    double lambda = 1e-3;
    Eigen::VectorXd diag_scale = Eigen::VectorXd::Zero(me);
    const double tol = problem.tolerance;
    int iter = 0;
    bool converged = chi2 == 0.0;
    std::string message = converged ? "exact fit at initial parameters" : "";

    while (!converged && iter < problem.max_iterations) {
        ++iter;
        Eigen::MatrixXd jtj = jac.transpose() * jac;
        Eigen::VectorXd grad = jac.transpose() * r;

        // Scaled gradient test (cosine between residual and Jacobian columns).
        double gmax = 0.0;
        const double rnorm = std::sqrt(chi2);
        for (Eigen::Index j = 0; j < me; ++j) {
            const double cn = jac.col(j).norm();
            if (cn > 0.0 && rnorm > 0.0) gmax = std::max(gmax, std::abs(grad[j]) / (cn * rnorm));
        }
        if (gmax <= tol) {
            converged = true;
            message = "gradient tolerance reached";
            break;
        }

        for (Eigen::Index j = 0; j < me; ++j) diag_scale[j] = std::max(diag_scale[j], jtj(j, j));

        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index j = 0; j < me; ++j) {
                a(j, j) += lambda * (diag_scale[j] > 0.0 ? diag_scale[j] : 1.0);
            }
            const Eigen::VectorXd step = a.ldlt().solve(-grad);
            const Eigen::VectorXd q_trial = q + step;
            const std::vector<double> p_trial = transform.external(q_trial);
            Eigen::VectorXd r_trial;
            const bool finite = step.allFinite() && eval.residuals(p_trial, r_trial);
            const double chi2_trial = finite ? r_trial.squaredNorm() : kInf;

            if (finite && chi2_trial <= chi2) {
                const double reduction = chi2 - chi2_trial;
                bool small_step = true;
                for (Eigen::Index j = 0; j < me; ++j) {
                    if (std::abs(step[j]) > tol * (std::abs(q[j]) + tol)) small_step = false;
                }
                q = q_trial;
                p = p_trial;
                r = r_trial;
                chi2 = chi2_trial;
                lambda = std::max(lambda / 10.0, 1e-15);
                accepted = true;
                if (!internal_jacobian(q, p, jac)) {
                    throw EvaluationError("Jacobian is not finite at (" + describe(problem.names, p) + ")");
                }
                if (chi2 == 0.0) {
                    converged = true;
                    message = "exact fit";
                } else if (small_step) {
                    converged = true;
                    message = "step tolerance reached";
                } else if (reduction <= tol * tol * chi2) {
                    converged = true;
                    message = "chi-square reduction below tolerance";
                }
            } else {
                lambda *= 10.0;
                if (lambda > 1e16) {
                    // No descent direction left at machine precision.
                    converged = gmax <= std::sqrt(tol);
                    message = converged ? "stalled at numerical minimum" : "damping overflow before convergence";
                    iter = problem.max_iterations;
                    break;
                }
            }
        }
    }
    if (!converged && message.empty()) message = "maximum iterations reached";

    result.names = problem.names;
    if (result.names.empty()) {
        for (std::size_t i = 0; i < m; ++i) result.names.push_back("p" + std::to_string(i));
    }
    result.params = p;
    result.chi2 = chi2;
    result.residual_norm = std::sqrt(chi2);
    result.dof = static_cast<int>(problem.n_residuals) - static_cast<int>(m);
    result.reduced_chi2 = chi2 / std::max(1, result.dof);
    result.iterations = iter;
    result.converged = converged;
    result.message = message;
    result.at_bound.resize(m);
    for (std::size_t i = 0; i < m; ++i) result.at_bound[i] = transform.near_bound(i, p[i]);

    // Covariance in external coordinates.
    Eigen::MatrixXd jext;
    if (!eval.jacobian(p, problem.initial_params, jext)) {
        throw EvaluationError("Jacobian is not finite at solution (" + describe(problem.names, p) + ")");
    }
    const Eigen::MatrixXd info = jext.transpose() * jext;
    Eigen::VectorXd d(me);
    std::vector<bool> insensitive(m, false);
    for (Eigen::Index j = 0; j < me; ++j) {
        d[j] = info(j, j) > 0.0 ? 1.0 / std::sqrt(info(j, j)) : 0.0;
        insensitive[static_cast<std::size_t>(j)] = info(j, j) <= 0.0;
    }
    const Eigen::MatrixXd scaled = d.asDiagonal() * info * d.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
    const Eigen::VectorXd evals = es.eigenvalues();
    const Eigen::MatrixXd evecs = es.eigenvectors();
    const double emax = evals.cwiseAbs().maxCoeff();
    Eigen::MatrixXd inv_scaled = Eigen::MatrixXd::Zero(me, me);
    std::vector<bool> unbounded = insensitive;
    for (Eigen::Index k = 0; k < me; ++k) {
        if (evals[k] > 1e-13 * emax && emax > 0.0) {
            inv_scaled += evecs.col(k) * evecs.col(k).transpose() / evals[k];
        } else {
            result.rank_deficient = true;
            for (Eigen::Index j = 0; j < me; ++j) {
                if (std::abs(evecs(j, k)) > 1e-6) unbounded[static_cast<std::size_t>(j)] = true;
            }
        }
    }
    Eigen::MatrixXd cov = d.asDiagonal() * inv_scaled * d.asDiagonal();
    const double scale = problem.scale_covariance ? result.reduced_chi2 : 1.0;
    cov *= scale;
    cov = 0.5 * (cov + cov.transpose());
    result.param_uncertainties.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (unbounded[j]) {
            cov(jj, jj) = kInf;
            result.param_uncertainties[j] = kInf;
        } else {
            result.param_uncertainties[j] = std::sqrt(std::max(0.0, cov(jj, jj)));
        }
    }
    result.covariance = cov;
    result.evaluations = eval.evaluations;
    return result;
}

FitResult fit(const CurveModel& model, const Trace& data, FitProblem base) {
    if (data.x.size() != data.y.size()) throw std::invalid_argument("trace x/y size mismatch");
    const std::vector<double> xs = data.x;
    const std::vector<double> ys = data.y;
    base.n_residuals = xs.size();
    base.residuals = [model, xs, ys](std::span<const double> p, std::span<double> out) {
        for (std::size_t i = 0; i < xs.size(); ++i) out[i] = model(xs[i], p) - ys[i];
    };
    return fit(base);
}

double normal_quantile_two_sided(double level) {
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");
    const boost::math::normal_distribution<double> normal;
    return boost::math::quantile(normal, 0.5 * (1.0 + level));
}

ConfidenceInterval profile_confidence(const FitResult& result, const FitProblem& problem,
                                      std::size_t index, double level) {
    if (!result.converged) throw std::invalid_argument("profile_confidence requires a converged fit");
    if (index >= problem.n_params()) throw std::out_of_range("parameter index out of range");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must be in (0, 1)");

    const boost::math::chi_squared_distribution<double> chi2_1(1.0);
    const double threshold = boost::math::quantile(chi2_1, level) * result.reduced_chi2;
    const double best = result.params[index];
    const double chi2_min = result.chi2;
    const std::size_t m = problem.n_params();
    const double lo_bound = problem.lower_bounds.empty() ? -kInf : problem.lower_bounds[index];
    const double hi_bound = problem.upper_bounds.empty() ? kInf : problem.upper_bounds[index];

    ConfidenceInterval out;
    out.best = best;

    // chi^2 with parameter `index` pinned to `value` and the rest re-optimized.
    std::vector<double> warm(result.params);
    auto profile = [&](double value) {
        if (m == 1) {
            Evaluator eval(problem);
            Eigen::VectorXd r;
            const std::vector<double> pv{value};
            if (!eval.residuals(pv, r)) return kInf;
            return r.squaredNorm();
        }
        FitProblem sub;
        sub.n_residuals = problem.n_residuals;
        sub.weights = problem.weights;
        sub.max_iterations = problem.max_iterations;
        sub.tolerance = problem.tolerance;
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == index) continue;
            free.push_back(i);
            sub.initial_params.push_back(warm[i]);
            sub.lower_bounds.push_back(problem.lower_bounds.empty() ? -kInf : problem.lower_bounds[i]);
            sub.upper_bounds.push_back(problem.upper_bounds.empty() ? kInf : problem.upper_bounds[i]);
        }
        const ResidualFn full = problem.residuals;
        sub.residuals = [full, free, index, value, m](std::span<const double> q, std::span<double> out_r) {
            std::vector<double> pv(m);
            pv[index] = value;
            for (std::size_t k = 0; k < free.size(); ++k) pv[free[k]] = q[k];
            full(pv, out_r);
        };
        try {
            const FitResult r = fit(sub);
            for (std::size_t k = 0; k < free.size(); ++k) warm[free[k]] = r.params[k];
            return r.chi2;
        } catch (const EvaluationError&) {
            return kInf;
        }
    };

    double step = result.param_uncertainties[index];
    if (!std::isfinite(step) || step <= 0.0) {
        step = 0.1 * std::max(std::abs(best), 1e-12);
    }

    auto scan = [&](double direction, bool& open) {
        warm = result.params;
        double inside = best;
        double delta = 0.5 * step;
        for (int k = 0; k < 60; ++k) {
            double candidate = inside + direction * delta;
            bool clipped = false;
            if (candidate <= lo_bound || candidate >= hi_bound) {
                candidate = direction > 0 ? hi_bound - 1e-12 * std::max(std::abs(hi_bound), 1.0)
                                          : lo_bound + 1e-12 * std::max(std::abs(lo_bound), 1.0);
                clipped = true;
            }
            const double dchi = profile(candidate) - chi2_min;
            if (dchi > threshold) {
                double a = inside;
                double b = candidate;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (a + b);
                    if (profile(mid) - chi2_min > threshold) b = mid; else a = mid;
                    if (std::abs(b - a) <= 1e-10 * std::max(std::abs(best), std::abs(step))) break;
                }
                open = false;
                return 0.5 * (a + b);
            }
            inside = candidate;
            if (clipped) break;
            delta *= 1.5;
        }
        open = true;
        return inside;
    };

    out.upper = scan(+1.0, out.upper_open);
    out.lower = scan(-1.0, out.lower_open);
    return out;
}

} // namespace scq::fit
