#pragma once

#include "scq/fit.hpp"
#include "scq/trace.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace scq::resonator {

/// Normalized notch-type transmission of a side-coupled resonator:
/// 1 - (Q / |Q_e|) e^{i phi} / (1 + 2 i Q (f - f0) / f0).
[[nodiscard]] std::complex<double> notch_s21(double f, double f0, double q_total, double q_external_mag,
                                             double phi);

/// Loaded Q from internal Q, |Q_e| and the impedance-mismatch rotation.
[[nodiscard]] double loaded_q(double q_internal, double q_external_mag, double phi);

struct ResonatorFit {
    double f0 = 0.0;
    double q_total = 0.0;
    double q_internal = 0.0;
    double q_external_mag = 0.0;
    double phi = 0.0;
    std::optional<double> photon_number;

    double f0_uncertainty = 0.0;
    double q_total_uncertainty = 0.0;
    double q_internal_uncertainty = 0.0;
    double q_external_uncertainty = 0.0;
    double phi_uncertainty = 0.0;

    /// A parameter finished on (or numerically next to) a bound, or Q_i came
    /// out non-positive.
    bool flagged = false;
    fit::FitResult result;
};

struct S21Options {
    /// Fraction of points (split between both ends) used for the baseline.
    double baseline_fraction = 0.2;
    double min_dip_snr = 3.0;
    double min_linewidths_each_side = 3.0;
};

/// Complex-plane fit of a notch resonance. A complex linear baseline fitted
/// to the outer points normalizes the trace for dip detection and starting
/// values; the final fit then refines that baseline jointly with
/// (f0, Q, |Q_e|, phi) on the raw data, so resonance tails under the outer
/// points do not bias the result.
///
/// Throws AnalysisError when there is no dip above the noise floor or the
/// trace spans too few linewidths.
[[nodiscard]] ResonatorFit fit_s21(const ComplexTrace& trace, const S21Options& options = {});

/// Mean photon number 2 Q^2 P / (hbar omega0^2 |Q_e|) of a notch resonator.
[[nodiscard]] double photon_number(const ResonatorFit& fit, double power_at_chip);

struct TlsParams {
    double f_delta0 = 0.0; ///< filling factor times intrinsic loss tangent
    double n_c = 1.0;      ///< critical photon number
    double beta = 0.5;     ///< saturation exponent
};

/// 1/Q_TLS = F delta0 tanh(h f / 2 k_B T) / (1 + n / n_c)^beta.
[[nodiscard]] double tls_loss(double n_ph, double t, double f, const TlsParams& params);

enum class PowerModel { TlsPlusConstant, ConstantOnly };

struct QiPowerFit {
    fit::FitResult result; ///< f_delta0, n_c, beta, q_other
    TlsParams tls;
    double q_other = 0.0;
    PowerModel selected = PowerModel::TlsPlusConstant;
    /// Photon numbers span less than two decades.
    bool rank_warning = false;
};

struct QiPoint {
    double x = 0.0; ///< photon number or temperature
    double q_i = 0.0;
};

struct QiPowerOptions {
    bool fit_beta = true;
    double beta = 0.5;
};

/// Fits 1/Q_i(n) = 1/Q_TLS(n) + 1/Q_other. If the TLS amplitude is not
/// significantly non-zero the constant-only model is selected.
[[nodiscard]] QiPowerFit fit_qi_vs_power(const std::vector<QiPoint>& points, double t, double f,
                                         const QiPowerOptions& options = {});

struct QiTemperatureOptions {
    /// TLS saturation shape at the measurement photon number.
    double n_c = 10.0;
    double beta = 0.5;
    std::optional<double> fixed_alpha;
    std::optional<double> fixed_f_delta0;
    double mb_tolerance = 1e-9;
};

struct QiTemperatureFit {
    fit::FitResult result;
    double q_other = 0.0;
    double f_delta0 = 0.0;
    double alpha_kin = 0.0;
};

/// Conduction-loss quality factor (1/alpha) sigma2/sigma1 with the gap
/// following the BCS interpolation for the given tc.
[[nodiscard]] double q_sigma(double t, double f, double tc, double alpha, double mb_tolerance = 1e-9);

/// 1/Q_i(T) = 1/Q_other + 1/Q_TLS(T) + alpha sigma1/sigma2.
[[nodiscard]] double qi_temperature_model(double t, double f, double tc, double n_ph, double q_other,
                                          double f_delta0, double alpha, const QiTemperatureOptions& options = {});

/// Fits the composite loss model over temperature with tc held fixed.
/// Throws DomainError for temperatures at or above tc.
[[nodiscard]] QiTemperatureFit fit_qi_vs_temperature(const std::vector<QiPoint>& points, double f, double tc,
                                                     double n_ph, const QiTemperatureOptions& options = {});

} // namespace scq::resonator
