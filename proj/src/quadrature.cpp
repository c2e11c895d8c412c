#include "scq/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace scq::quad {

namespace {

// Kronrod abscissae (positive half) and weights, with the embedded 7-point
// Gauss weights at odd Kronrod indices.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Segment& other) const { return error < other.error; }
};

// QUADPACK qk15 error heuristic.
Segment gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double result_gauss = fc * kWg[3];
    double result_kronrod = fc * kWgk[7];
    double result_abs = std::abs(result_kronrod);
    std::array<double, 7> fv1{};
    std::array<double, 7> fv2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = f(center - dx);
        const double f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        result_kronrod += kWgk[j] * (f1 + f2);
        result_abs += kWgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) {
            result_gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    const double mean = result_kronrod * 0.5;
    double result_asc = kWgk[7] * std::abs(fc - mean);
    for (int j = 0; j < 7; ++j) {
        result_asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
    }
    const double scale = std::abs(half);
    result_kronrod *= half;
    result_gauss *= half;
    result_abs *= scale;
    result_asc *= scale;

    double err = std::abs(result_kronrod - result_gauss);
    if (result_asc != 0.0 && err != 0.0) {
        err = result_asc * std::min(1.0, std::pow(200.0 * err / result_asc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (result_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(50.0 * eps * result_abs, err);
    }
    return {a, b, result_kronrod, err};
}

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& options) {
    if (a == b) {
        return {0.0, 0.0, 0, true};
    }
    std::priority_queue<Segment> queue;
    Segment first = gauss_kronrod_15(f, a, b);
    double total = first.value;
    double total_error = first.error;
    queue.push(first);

    auto target = [&] { return options.tolerance * std::min(1.0, std::abs(total)); };

    while (total_error > target() && queue.size() < options.max_intervals) {
        Segment worst = queue.top();
        queue.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval can no longer be split in floating point.
            queue.push(worst);
            break;
        }
        Segment left = gauss_kronrod_15(f, worst.a, mid);
        Segment right = gauss_kronrod_15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        queue.push(left);
        queue.push(right);
    }

    // Re-sum to avoid drift from incremental updates.
    Result result;
    result.intervals = queue.size();
    double value = 0.0;
    double error = 0.0;
    while (!queue.empty()) {
        value += queue.top().value;
        error += queue.top().error;
        queue.pop();
    }
    result.value = value;
    result.error = error;
    result.converged = error <= options.tolerance * std::min(1.0, std::abs(value));
    return result;
}

} // namespace scq::quad
