#pragma once

#include "scq/trace.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace scq::fit {

/// Fills `residuals` (model minus data, unweighted) for the given parameters.
using ResidualFn = std::function<void(std::span<const double> params, std::span<double> residuals)>;

/// Optional analytic Jacobian: d residual_i / d param_j, row-major
/// (residual index major), size n_residuals * n_params.
using JacobianFn = std::function<void(std::span<const double> params, std::span<double> jacobian)>;

/// A weighted nonlinear least-squares problem. Immutable once handed to fit().
struct FitProblem {
    ResidualFn residuals;
    std::size_t n_residuals = 0;
    std::vector<double> initial_params;
    std::vector<std::string> names;
    /// Per-parameter bounds; use -inf / +inf for free directions.
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;
    /// Per-residual positive weights; empty means unit weights.
    std::vector<double> weights;
    JacobianFn jacobian;
    int max_iterations = 200;
    double tolerance = 1e-10;
    /// Scale the covariance by the reduced chi-square (measurement noise
    /// unknown). When false the raw (J^T W J)^-1 is reported.
    bool scale_covariance = true;

    [[nodiscard]] std::size_t n_params() const { return initial_params.size(); }

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

struct FitResult {
    std::vector<std::string> names;
    std::vector<double> params;
    Eigen::MatrixXd covariance;
    std::vector<double> param_uncertainties;
    double residual_norm = 0.0; ///< sqrt of the weighted sum of squares
    double chi2 = 0.0;
    double reduced_chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool rank_deficient = false;
    std::vector<bool> at_bound;
    std::string message;

    [[nodiscard]] double param(std::string_view name) const;
    [[nodiscard]] double uncertainty(std::string_view name) const;
    [[nodiscard]] std::size_t index(std::string_view name) const;
    [[nodiscard]] bool any_at_bound() const;
};

/// Damped Gauss-Newton (Levenberg-Marquardt) minimization of
/// sum_i w_i r_i(p)^2. Bounded parameters are optimized in a transformed
/// space (logistic for two-sided bounds, exponential for one-sided) so the
/// Jacobian stays smooth. Deterministic for identical inputs.
///
/// Throws EvaluationError if the model is non-finite at the initial
/// parameters; a failure to converge is reported through `converged`.
[[nodiscard]] FitResult fit(const FitProblem& problem);

/// y = model(x, params) curve model for fitting a Trace.
using CurveModel = std::function<double(double x, std::span<const double> params)>;

/// Builds a FitProblem for `model` against `data` and fits it. `base`
/// supplies initial parameters, bounds, weights and stopping controls; its
/// residual function is ignored.
[[nodiscard]] FitResult fit(const CurveModel& model, const Trace& data, FitProblem base);

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double best = 0.0;
    bool lower_open = false;
    bool upper_open = false;

    [[nodiscard]] bool open() const { return lower_open || upper_open; }
};

/// Confidence interval from a profile scan: parameter `index` is stepped away
/// from the optimum, the remaining parameters are re-optimized, and the
/// interval ends where chi^2 rises by the chi-square(1) quantile at `level`
/// times the reduced chi-square of the best fit. A side that never crosses
/// the threshold within the bounds or scan range is flagged open.
[[nodiscard]] ConfidenceInterval profile_confidence(const FitResult& result,
                                                    const FitProblem& problem,
                                                    std::size_t index, double level = 0.6827);

/// Two-sided normal quantile used to turn a covariance sigma into an
/// interval at `level`.
[[nodiscard]] double normal_quantile_two_sided(double level);

} // namespace scq::fit
