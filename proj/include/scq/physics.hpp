#pragma once

#include <optional>

namespace scq {

/// Material constants of a superconducting film. Energies in eV, everything
/// else SI. Optional fields are filled in by film analysis.
struct SuperconductorParams {
    double tc = 0.0;     ///< K
    double delta0 = 0.0; ///< eV
    std::optional<double> rho0;               ///< Ohm m
    std::optional<double> sheet_resistance;   ///< Ohm per square
    std::optional<double> thickness;          ///< m
    std::optional<double> kinetic_inductance; ///< H per square
    std::optional<double> london_depth;       ///< m

    /// Parameters of a BCS film with the weak-coupling gap for `tc`.
    [[nodiscard]] static SuperconductorParams from_tc(double tc);

    /// Throws DomainError if any invariant is violated.
    void validate() const;
};

/// Mattis-Bardeen conductivity normalized to the normal-state value.
struct ComplexConductivityRatio {
    double sigma1_over_sigman = 0.0;
    double sigma2_over_sigman = 0.0;
    double frequency = 0.0;   ///< Hz
    double temperature = 0.0; ///< K
    double delta = 0.0;       ///< eV
};

struct GapResult {
    double delta = 0.0; ///< eV
    bool normal_state = false;
};

struct MattisBardeenOptions {
    /// Quadrature error bound, absolute and (below unity) relative.
    double tolerance = 1e-9;
};

/// Zero-temperature BCS gap 1.76 k_B Tc in eV. Throws DomainError for tc <= 0.
[[nodiscard]] double delta0_from_tc(double tc);

/// Critical temperature implied by a zero-temperature gap (inverse of
/// delta0_from_tc).
[[nodiscard]] double tc_from_delta0(double delta0);

/// BCS gap at temperature t from the tanh interpolation
/// Delta0 tanh(1.74 sqrt(tc/t - 1)). Returns zero with normal_state set when
/// t >= tc.
[[nodiscard]] GapResult gap_vs_temperature(double delta0, double tc, double t);

/// Sum-gap voltage (delta1 + delta2)/e of an S-I-S junction, in volts.
[[nodiscard]] double sum_gap_voltage(double delta1, double delta2);

/// Fermi occupation 1 / (exp(energy / kT) + 1) with kT in eV; kT = 0 gives
/// the step function.
[[nodiscard]] double fermi(double energy, double kt);

/// sigma1/sigma_n and sigma2/sigma_n in the sub-gap regime hbar*omega < 2 delta.
/// Band-edge singularities are removed by square-root substitutions so the
/// adaptive quadrature sees bounded integrands.
///
/// Throws UnsupportedRegimeError when hbar*omega >= 2 delta and DomainError
/// for non-positive frequency or gap, or negative temperature.
[[nodiscard]] ComplexConductivityRatio mattis_bardeen(double freq, double t, double delta,
                                                      const MattisBardeenOptions& options = {});

/// Thermal-equilibrium quasiparticle fraction sqrt(2 pi kT / Delta) exp(-Delta / kT);
/// zero at t = 0.
[[nodiscard]] double quasiparticle_density(double t, double delta);

} // namespace scq
