#pragma once

#include <complex>
#include <string>
#include <vector>

namespace scq {

/// A labeled series of real (x, y) measurement points in SI units.
struct Trace {
    std::string label;
    std::string x_unit;
    std::string y_unit;
    std::vector<double> x;
    std::vector<double> y;

    [[nodiscard]] std::size_t size() const { return x.size(); }
};

/// A labeled series of (x, complex y) points, e.g. S21 versus frequency.
struct ComplexTrace {
    std::string label;
    std::string x_unit;
    std::vector<double> x;
    std::vector<std::complex<double>> y;

    [[nodiscard]] std::size_t size() const { return x.size(); }
};

} // namespace scq
