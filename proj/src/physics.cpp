#include "scq/physics.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"
#include "scq/quadrature.hpp"

#include <cmath>
#include <string>

namespace scq {

namespace {

using constants::boltzmann_ev;

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " +
                          std::to_string(value));
    }
}

// 1 - 2 f(E) = tanh(E / 2kT).
double one_minus_two_fermi(double energy, double kt) {
    if (kt <= 0.0) {
        return energy > 0.0 ? 1.0 : (energy < 0.0 ? -1.0 : 0.0);
    }
    return std::tanh(energy / (2.0 * kt));
}

// f(E) - f(E + w) for w > 0, evaluated without cancellation.
double fermi_difference(double energy, double w, double kt) {
    if (kt <= 0.0) {
        return (energy < 0.0 && energy + w > 0.0) ? 1.0 : 0.0;
    }
    const double a = energy / (2.0 * kt);
    const double b = (energy + w) / (2.0 * kt);
    if (a > 350.0) {
        // Both occupations are Boltzmann tails.
        return std::exp(-2.0 * a) * -std::expm1(-w / kt);
    }
    return std::sinh((b - a)) / (2.0 * std::cosh(a) * std::cosh(b));
}

} // namespace

SuperconductorParams SuperconductorParams::from_tc(double tc) {
    SuperconductorParams p;
    p.tc = tc;
    p.delta0 = delta0_from_tc(tc);
    return p;
}

void SuperconductorParams::validate() const {
    require_positive(tc, "tc");
    require_positive(delta0, "delta0");
    if (kinetic_inductance) {
        require_positive(*kinetic_inductance, "kinetic_inductance");
    }
    if (london_depth) {
        require_positive(*london_depth, "london_depth");
    }
}

double delta0_from_tc(double tc) {
    require_positive(tc, "tc");
    return constants::bcs_gap_ratio * boltzmann_ev * tc;
}

double tc_from_delta0(double delta0) {
    require_positive(delta0, "delta0");
    return delta0 / (constants::bcs_gap_ratio * boltzmann_ev);
}

GapResult gap_vs_temperature(double delta0, double tc, double t) {
    require_positive(delta0, "delta0");
    require_positive(tc, "tc");
    if (t < 0.0) {
        throw DomainError("temperature must be non-negative");
    }
    if (t >= tc) {
        return {0.0, true};
    }
    if (t == 0.0) {
        return {delta0, false};
    }
    return {delta0 * std::tanh(1.74 * std::sqrt(tc / t - 1.0)), false};
}

double sum_gap_voltage(double delta1, double delta2) {
    require_positive(delta1, "delta1");
    require_positive(delta2, "delta2");
    // Energies are in eV, so dividing by e is numerically the identity.
    return delta1 + delta2;
}

double fermi(double energy, double kt) {
    return 0.5 * (1.0 - one_minus_two_fermi(energy, kt));
}

ComplexConductivityRatio mattis_bardeen(double freq, double t, double delta,
                                        const MattisBardeenOptions& options) {
    require_positive(freq, "frequency");
    require_positive(delta, "delta");
    if (t < 0.0 || !std::isfinite(t)) {
        throw DomainError("temperature must be non-negative");
    }
    const double w = units::hz_to_ev(freq); // hbar omega in eV
    if (w >= 2.0 * delta) {
        throw UnsupportedRegimeError("hbar*omega >= 2*delta: pair-breaking regime is not modeled");
    }
    const double kt = boltzmann_ev * t;
    const quad::Options qopt{options.tolerance, 4000};

    ComplexConductivityRatio out;
    out.frequency = freq;
    out.temperature = t;
    out.delta = delta;

    // sigma1: (2/w) int_delta^inf [f(E) - f(E+w)] g(E) dE with E = delta + u^2.
    if (kt > 0.0) {
        const double u_max = std::sqrt(60.0 * kt);
        auto integrand = [&](double u) {
            const double u2 = u * u;
            const double e = delta + u2;
            const double ew = e + w;
            const double numer = e * e + delta * delta + w * e;
            const double denom = std::sqrt(2.0 * delta + u2) * std::sqrt(ew * ew - delta * delta);
            return 2.0 * fermi_difference(e, w, kt) * numer / denom;
        };
        // Scale inside the quadrature so the tolerance applies to the ratio itself.
        const double prefactor = 2.0 / w;
        auto scaled = [&](double u) { return prefactor * integrand(u); };
        out.sigma1_over_sigman = std::max(0.0, quad::integrate(scaled, 0.0, u_max, qopt).value);
    }

    // sigma2: (1/w) int_{delta-w}^{delta} [1 - 2 f(E+w)] g2(E) dE, split at the
    // midpoint with E = delta - v^2 above and E = delta - w + v^2 below.
    const double v_max = std::sqrt(0.5 * w);
    auto upper = [&](double v) {
        const double v2 = v * v;
        const double e = delta - v2;
        const double ew = e + w;
        const double numer = e * e + delta * delta + w * e;
        const double denom = std::sqrt(2.0 * delta - v2) * std::sqrt(ew * ew - delta * delta);
        return 2.0 * one_minus_two_fermi(ew, kt) * numer / denom / w;
    };
    auto lower = [&](double v) {
        const double v2 = v * v;
        const double e = delta - w + v2;
        const double ew = delta + v2;
        const double numer = e * e + delta * delta + w * e;
        const double denom = std::sqrt(delta * delta - e * e) * std::sqrt(2.0 * delta + v2);
        return 2.0 * one_minus_two_fermi(ew, kt) * numer / denom / w;
    };
    const double s2 = quad::integrate(upper, 0.0, v_max, qopt).value +
                      quad::integrate(lower, 0.0, v_max, qopt).value;
    out.sigma2_over_sigman = std::max(0.0, s2);
    return out;
}

double quasiparticle_density(double t, double delta) {
    require_positive(delta, "delta");
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("temperature must be non-negative and finite");
    }
    if (t == 0.0) return 0.0;
    const double kt = boltzmann_ev * t;
    return std::sqrt(2.0 * constants::pi * kt / delta) * std::exp(-delta / kt);
}

} // namespace scq
