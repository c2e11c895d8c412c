#pragma once

#include "scq/film.hpp"
#include "scq/junction.hpp"
#include "scq/qubit.hpp"
#include "scq/resonator.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scq::report {

inline constexpr int kSchemaVersion = 1;

/// One input file consumed by a result row.
struct InputRef {
    std::string role;   ///< e.g. "areas", "iv", "t1"
    std::string source; ///< path as written in the configuration
    std::string digest; ///< SHA-256 of the file bytes
    bool operator==(const InputRef&) const = default;
};

struct FilmRow {
    std::string wafer_id;
    std::string source;
    std::string digest;
    film::FilmReport film;
    bool operator==(const FilmRow&) const = default;
};

struct CalibrationRow {
    std::string wafer_id;
    std::string digest; ///< of the area-scaling file
    std::vector<InputRef> inputs;
    junction::WaferCalibration calibration;
    double specific_resistance_uncertainty = 0.0;
    double dimension_bias_uncertainty = 0.0;
    double ic = 0.0; ///< A, from the IV trace
    double rn = 0.0; ///< Ohm, from the IV trace
    bool operator==(const CalibrationRow&) const = default;
};

struct ResonatorRow {
    std::string wafer_id;
    std::string source;
    std::string digest;
    double f0 = 0.0;
    double q_total = 0.0;
    double q_internal = 0.0;
    double q_external = 0.0;
    double phi = 0.0;
    std::optional<double> photon_number;
    double f0_uncertainty = 0.0;
    double q_internal_uncertainty = 0.0;
    double q_external_uncertainty = 0.0;
    double reduced_chi2 = 0.0;
    bool flagged = false;
    bool operator==(const ResonatorRow&) const = default;
};

struct QubitRow {
    std::string wafer_id;
    std::string qubit_id;
    std::string digest; ///< of the T1 trace
    std::vector<InputRef> inputs;
    qubit::CoherenceRecord record;
    double t1_uncertainty = 0.0;
    double t2_star_uncertainty = 0.0;
    double t2_echo_uncertainty = 0.0;
    double ramsey_detuning = 0.0;
    bool t1_unbounded = false;
    bool no_fringe = false;
    std::optional<junction::JunctionGeometry> geometry;
    std::optional<junction::JunctionPrediction> junction;
    std::optional<qubit::TransmonParams> transmon;
    bool operator==(const QubitRow&) const = default;
};

struct XyPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const XyPoint&) const = default;
};

struct QiPowerRow {
    std::string wafer_id;
    std::string source;
    std::string digest;
    double temperature = 0.0;
    double frequency = 0.0;
    double f_delta0 = 0.0;
    double n_c = 0.0;
    double beta = 0.0;
    double q_other = 0.0;
    std::string model; ///< "tls_plus_constant" or "constant_only"
    bool rank_warning = false;
    std::vector<XyPoint> points; ///< photon number, Q_i
    bool operator==(const QiPowerRow&) const = default;
};

struct QiTemperatureRow {
    std::string wafer_id;
    std::string source;
    std::string digest;
    double frequency = 0.0;
    double tc = 0.0;
    double photon_number = 0.0;
    double q_other = 0.0;
    double f_delta0 = 0.0;
    double alpha_kin = 0.0;
    double n_c = 0.0;
    double beta = 0.0;
    std::vector<XyPoint> points; ///< temperature, Q_i
    bool operator==(const QiTemperatureRow&) const = default;
};

struct AnnealRow {
    std::string wafer_id;
    std::string source;
    std::string digest;
    double alpha = 0.0;
    double tau = 0.0;
    double alpha_uncertainty = 0.0;
    double tau_uncertainty = 0.0;
    std::vector<XyPoint> points; ///< time, J_c ratio
    bool operator==(const AnnealRow&) const = default;
};

struct ExposureRow {
    std::string wafer_id;
    std::string source;
    std::string digest;
    junction::SpacerProcess spacer_process = junction::SpacerProcess::HDPCVD;
    double prefactor = 0.0;
    double exponent = 0.0;
    double prefactor_uncertainty = 0.0;
    double exponent_uncertainty = 0.0;
    std::vector<XyPoint> points; ///< exposure, J_c
    bool operator==(const ExposureRow&) const = default;
};

struct ErrorRow {
    std::string wafer_id;
    std::string stage;
    std::string source;
    std::string message;
    bool operator==(const ErrorRow&) const = default;
};

struct Provenance {
    std::string source;
    std::string kind;
    std::string digest;
    bool operator==(const Provenance&) const = default;
};

struct AnalysisReport {
    int schema_version = kSchemaVersion;
    std::string toolkit_version;
    std::string created_at;
    std::string wafer_id;
    std::string status = "complete"; ///< "complete" or "partial"
    std::vector<FilmRow> film;
    std::vector<CalibrationRow> calibrations;
    std::vector<ResonatorRow> resonators;
    std::vector<QubitRow> qubits;
    std::vector<QiPowerRow> qi_power;
    std::vector<QiTemperatureRow> qi_temperature;
    std::vector<AnnealRow> anneals;
    std::vector<ExposureRow> exposures;
    std::vector<ErrorRow> errors;
    std::vector<Provenance> provenance;

    [[nodiscard]] bool empty() const;
    bool operator==(const AnalysisReport&) const = default;
};

/// Toolkit version compiled into the library.
[[nodiscard]] std::string toolkit_version();

/// Pretty-printed JSON document. Non-finite numbers are written as the
/// strings "inf", "-inf" and "nan" so every value survives a round trip.
[[nodiscard]] std::string serialize(const AnalysisReport& report);

/// Throws SchemaError on malformed documents or an unsupported schema version.
[[nodiscard]] AnalysisReport parse(std::string_view text);

[[nodiscard]] AnalysisReport load(const std::filesystem::path& path);
void save(const std::filesystem::path& path, const AnalysisReport& report);

} // namespace scq::report
