#pragma once

#include "scq/fit.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scq::junction {

enum class SpacerProcess { PECVD, HDPCVD };

[[nodiscard]] std::string_view to_string(SpacerProcess process);
/// Case-insensitive; throws std::invalid_argument for unknown names.
[[nodiscard]] SpacerProcess spacer_process_from_string(std::string_view name);

/// Lithographic junction dimensions and the etch reduction applied to each
/// lateral dimension.
struct JunctionGeometry {
    double design_width = 0.0;   ///< m
    double design_height = 0.0;  ///< m
    double dimension_bias = 0.0; ///< m

    /// Effective dimensions; throw GeometryError naming the collapsed side.
    [[nodiscard]] double effective_width() const;
    [[nodiscard]] double effective_height() const;
    [[nodiscard]] double effective_area() const;

    bool operator==(const JunctionGeometry&) const = default;
};

/// Per-wafer junction constants. jc is always icrn_product / specific_resistance.
struct WaferCalibration {
    std::string wafer_id;
    double specific_resistance = 0.0; ///< Ohm m^2
    double dimension_bias = 0.0;      ///< m
    double icrn_product = 0.0;        ///< V
    double jc = 0.0;                  ///< A / m^2
    double oxidation_exposure = 0.0;  ///< Pa s (0 when unknown)
    SpacerProcess spacer_process = SpacerProcess::HDPCVD;
    double tc = 0.0;                  ///< K (0 when unknown)
    /// measured / Ambegaokar-Baratoff product, when a gap was supplied.
    std::optional<double> icrn_suppression;

    /// Builds a calibration with jc derived from the other fields.
    [[nodiscard]] static WaferCalibration make(std::string wafer_id, double specific_resistance,
                                               double dimension_bias, double icrn_product,
                                               double oxidation_exposure = 0.0,
                                               SpacerProcess process = SpacerProcess::HDPCVD,
                                               double tc = 0.0);

    /// Checks positivity and the jc consistency identity (1e-9 relative).
    void validate() const;

    /// Design dimensions with this wafer's dimension bias applied.
    [[nodiscard]] JunctionGeometry geometry(double design_width, double design_height) const {
        return {design_width, design_height, dimension_bias};
    }

    bool operator==(const WaferCalibration&) const = default;
};

/// Ambegaokar-Baratoff I_c R_n = (pi Delta / 2e) tanh(Delta / 2 k_B T), volts.
[[nodiscard]] double ab_icrn(double delta, double t);

/// Ratio of a measured I_c R_n product to the Ambegaokar-Baratoff value.
[[nodiscard]] double icrn_suppression(double measured_product, double delta, double t);

[[nodiscard]] double ic_from_rn(double rn, double icrn_product);

/// L_J = Phi0 / (2 pi I_c).
[[nodiscard]] double josephson_inductance(double ic);

/// J_c = I_c R_n / rho_s.
[[nodiscard]] double jc_from_calibration(double specific_resistance, double icrn_product);

struct AreaSample {
    double design_width = 0.0;  ///< m
    double design_height = 0.0; ///< m
    double resistance = 0.0;    ///< Ohm
};

struct AreaFit {
    fit::FitResult result;
    double specific_resistance = 0.0;
    double dimension_bias = 0.0;
    /// Relative standard deviation of resistance about the model.
    double resistance_spread = 0.0;
};

/// Fits R = rho_s / ((w - d)(h - d)) with d in [0, min dimension), using
/// relative residuals. Throws RankDeficiencyError when all samples share one
/// area and AnalysisError for fewer than four samples.
[[nodiscard]] AreaFit fit_area_scaling(const std::vector<AreaSample>& samples);

struct ExposurePoint {
    double exposure = 0.0; ///< Pa s
    double jc = 0.0;       ///< A / m^2
};

struct ExposureFit {
    fit::FitResult result; ///< parameters: log_prefactor, exponent (if free)
    double prefactor = 0.0;
    double prefactor_uncertainty = 0.0;
    double exponent = 0.0;
    double exponent_uncertainty = 0.0;
};

/// Fits J_c = K E^p by least squares on log J_c. With `fix_exponent` only K
/// is free.
[[nodiscard]] ExposureFit fit_exposure_law(const std::vector<ExposurePoint>& points,
                                           std::optional<double> fix_exponent = std::nullopt);

struct GroupedExposureFit {
    fit::FitResult result;
    std::vector<std::string> groups;
    std::vector<double> prefactors;
    double exponent = 0.0;
};

/// Per-group prefactors with one shared (free or fixed) exponent.
[[nodiscard]] GroupedExposureFit fit_exposure_law_grouped(
    const std::vector<std::pair<std::string, std::vector<ExposurePoint>>>& groups,
    std::optional<double> fix_exponent = std::nullopt);

struct AnnealPoint {
    double time = 0.0;     ///< s
    double jc_ratio = 0.0; ///< J_c / J_c^0
};

struct AnnealFit {
    fit::FitResult result;
    double alpha = 0.0;
    double tau = 0.0;
};

/// Saturating decay J_c/J_c^0 = (1 - alpha) exp(-t / tau) + alpha.
[[nodiscard]] double anneal_model(double time, double alpha, double tau);

/// Throws DomainError for ratios outside (0, 1].
[[nodiscard]] AnnealFit fit_annealing(const std::vector<AnnealPoint>& points);

struct JunctionPrediction {
    double effective_area = 0.0; ///< m^2
    double rn = 0.0;             ///< Ohm
    double ic = 0.0;             ///< A
    double l_j = 0.0;            ///< H
    double ej_over_h = 0.0;      ///< Hz

    bool operator==(const JunctionPrediction&) const = default;
};

/// Uses the dimension bias carried by `geometry`; see WaferCalibration::geometry.
[[nodiscard]] JunctionPrediction predict_junction(const JunctionGeometry& geometry,
                                                  const WaferCalibration& cal);

} // namespace scq::junction
