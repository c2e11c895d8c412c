#pragma once

#include "scq/fit.hpp"
#include "scq/junction.hpp"
#include "scq/trace.hpp"

#include <optional>
#include <vector>

namespace scq::qubit {

enum class SpectrumMode { Asymptotic, Exact };

struct ChargeBasisOptions {
    double offset_charge = 0.5; ///< n_g
    int cutoff = 20;            ///< charge states -cutoff..cutoff
};

struct Spectrum {
    double f01 = 0.0;           ///< Hz
    double anharmonicity = 0.0; ///< Hz, E12 - E01 (negative)
    double ej_over_ec = 0.0;
    bool transmon_regime = false; ///< E_J / E_C >= 20
};

/// Lowest `levels` eigen-energies (Hz) of 4 E_C (n - n_g)^2 - E_J cos(phi)
/// in the charge basis.
[[nodiscard]] std::vector<double> charge_basis_levels(double ej_over_h, double ec_over_h, int levels,
                                                      const ChargeBasisOptions& options = {});

/// Transmon f01 and anharmonicity. Asymptotic mode uses sqrt(8 E_J E_C) - E_C
/// and -E_C and refuses E_J/E_C < 5 (DomainError); exact mode diagonalizes
/// the Cooper-pair-box Hamiltonian.
[[nodiscard]] Spectrum transmon_spectrum(double ej_over_h, double ec_over_h,
                                         SpectrumMode mode = SpectrumMode::Asymptotic,
                                         const ChargeBasisOptions& options = {});

/// E_C / h = e^2 / (2 C_sigma h).
[[nodiscard]] double charging_energy(double c_sigma);

struct TransmonParams {
    double ej_over_h = 0.0;
    double ec_over_h = 0.0;
    double f01 = 0.0;
    double anharmonicity = 0.0;
    double c_sigma = 0.0;              ///< F
    double junction_capacitance = 0.0; ///< F
    double participation_pj = 0.0;
    bool transmon_regime = false;

    bool operator==(const TransmonParams&) const = default;
};

struct DesignOptions {
    /// Junction capacitance per effective area, F / m^2 (50 fF / um^2).
    double specific_capacitance = 0.05;
    SpectrumMode mode = SpectrumMode::Asymptotic;
};

/// Transmon parameters from the shunt capacitance and a junction designed on
/// a calibrated wafer. Geometry errors propagate from junction prediction.
[[nodiscard]] TransmonParams transmon_from_design(double c_sigma, const junction::JunctionGeometry& geometry,
                                                  const junction::WaferCalibration& cal,
                                                  const DesignOptions& options = {});

struct DecayFit {
    double time_constant = 0.0; ///< s (T1 or T2 echo)
    double amplitude = 0.0;
    double offset = 0.0;
    double time_constant_uncertainty = 0.0;
    /// Data do not constrain the decay time (flat trace).
    bool unbounded = false;
    fit::FitResult result;
};

/// P(t) = A exp(-t / T1) + B. Needs >= 10 points with non-negative delays.
[[nodiscard]] DecayFit fit_t1(const Trace& trace);

/// Hahn-echo envelope A exp(-t / T2) + B.
[[nodiscard]] DecayFit fit_echo(const Trace& trace);

struct RamseyFit {
    double t2_star = 0.0;  ///< s
    double detuning = 0.0; ///< Hz
    double phase = 0.0;    ///< rad
    double amplitude = 0.0;
    double offset = 0.0;
    double t2_star_uncertainty = 0.0;
    double detuning_uncertainty = 0.0;
    /// No spectral peak found; the decay was fitted as a pure exponential.
    bool no_fringe = false;
    fit::FitResult result;
};

/// P(t) = A exp(-t / T2*) cos(2 pi df t + phase) + B with df seeded from the
/// dominant peak of the discrete spectrum. Needs >= 20 points.
[[nodiscard]] RamseyFit fit_ramsey(const Trace& trace);

struct CoherenceRecord {
    double f_q = 0.0;
    double t1 = 0.0;
    double t2_star = 0.0;
    double t2_echo = 0.0;
    double q1 = 0.0;
    double q2_star = 0.0;
    double q2_echo = 0.0;
    double temperature = 0.0;
    /// T2* exceeds 2 T1 (unphysical beyond fit error).
    bool t2_star_exceeds_limit = false;
    /// T2 echo below T2*, reported but not enforced.
    bool echo_below_ramsey = false;

    [[nodiscard]] static CoherenceRecord make(double f_q, double t1, double t2_star, double t2_echo,
                                              double temperature = 0.0);

    bool operator==(const CoherenceRecord&) const = default;
};

/// 2 pi f T.
[[nodiscard]] double quality_factor(double f, double time_constant);

struct PopulationMeans {
    double q1 = 0.0;
    double q2_star = 0.0;
    double q2_echo = 0.0;
};

/// Arithmetic means over records.
[[nodiscard]] PopulationMeans population_means(const std::vector<CoherenceRecord>& records);

struct BudgetPoint {
    double p_j = 0.0;
    double q1 = 0.0;
};

struct BudgetFit {
    fit::FitResult result; ///< q_junction, q_other
    double q_junction = 0.0;
    double q_other = 0.0;
};

/// 1/Q1 = p_j / Q_J + (1 - p_j) / Q_0.
[[nodiscard]] double budget_model(double p_j, double q_junction, double q_other);

/// Throws RankDeficiencyError when fewer than two distinct p_j are present.
[[nodiscard]] BudgetFit loss_budget_fit(const std::vector<BudgetPoint>& points);

struct BandPoint {
    double p_j = 0.0;
    double q1 = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Model curve with a band from the parameter covariance (not a prediction
/// band) at the given confidence level.
[[nodiscard]] std::vector<BandPoint> budget_band(const BudgetFit& fit, const std::vector<double>& p_j,
                                                 double level = 0.95);

/// Quasiparticle-limited Q = (pi / x_qp) sqrt(h f / (2 Delta)).
[[nodiscard]] double quasiparticle_q(double f_q, double t, double delta);

/// Temperature at which quasiparticle_q falls to `q_target`.
[[nodiscard]] double quasiparticle_onset(double f_q, double delta, double q_target);

struct BathModel {
    double q1_zero = 0.0; ///< Q1 at T = 0
    double f_q = 0.0;     ///< Hz
    double delta = 0.0;   ///< eV
};

struct QCurvePoint {
    double temperature = 0.0;
    double q_bath = 0.0;
    double q_qp = 0.0;
    double q_total = 0.0;
};

/// 1/Q1(T) = 1/Q_bath(T) + 1/Q_qp(T), with Q_bath = Q1(0) tanh(h f / 2 k_B T).
[[nodiscard]] std::vector<QCurvePoint> q_vs_temperature_model(const std::vector<double>& temperatures,
                                                              const BathModel& model);

} // namespace scq::qubit
