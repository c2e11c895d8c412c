#pragma once

#include <cstddef>
#include <functional>

namespace scq::quad {

struct Options {
    /// Requested error bound: the estimate must satisfy
    /// err <= tolerance * min(1, |integral|), i.e. absolute below `tolerance`
    /// and relative below `tolerance` once the integral falls under one.
    double tolerance = 1e-9;
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
    bool converged = false;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration on a finite
/// interval. The worst interval is bisected until the summed error estimate
/// meets the tolerance or the interval budget is exhausted.
[[nodiscard]] Result integrate(const std::function<double(double)>& f, double a, double b,
                               const Options& options = {});

} // namespace scq::quad
