#include "scq/report.hpp"

#include "scq/digest.hpp"
#include "scq/errors.hpp"

#include "json.hpp"

#include <cmath>
#include <limits>

#ifndef SCQ_VERSION
#define SCQ_VERSION "0.0.0"
#endif

namespace scq::report {

using nlohmann::json;

namespace {

// Each serializable type gets an encode/decode pair; the field macros below
// keep the two directions in lock step.

json encode(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}
json encode(bool v) { return v; }
json encode(int v) { return v; }
json encode(const std::string& v) { return v; }
json encode(junction::SpacerProcess p) { return std::string(junction::to_string(p)); }

void decode(const json& j, double& v) {
    if (j.is_number()) {
        v = j.get<double>();
    } else if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") v = std::numeric_limits<double>::infinity();
        else if (s == "-inf") v = -std::numeric_limits<double>::infinity();
        else if (s == "nan") v = std::numeric_limits<double>::quiet_NaN();
        else throw SchemaError("expected a number, got '" + s + "'");
    } else {
        throw SchemaError("expected a number");
    }
}
void decode(const json& j, bool& v) {
    if (!j.is_boolean()) throw SchemaError("expected a boolean");
    v = j.get<bool>();
}
void decode(const json& j, int& v) {
    if (!j.is_number_integer()) throw SchemaError("expected an integer");
    v = j.get<int>();
}
void decode(const json& j, std::string& v) {
    if (!j.is_string()) throw SchemaError("expected a string");
    v = j.get<std::string>();
}
void decode(const json& j, junction::SpacerProcess& p) {
    std::string s;
    decode(j, s);
    p = junction::spacer_process_from_string(s);
}

json encode(const InputRef& v);
void decode(const json& j, InputRef& v);
json encode(const film::FilmReport& v);
void decode(const json& j, film::FilmReport& v);
json encode(const junction::WaferCalibration& v);
void decode(const json& j, junction::WaferCalibration& v);
json encode(const junction::JunctionGeometry& v);
void decode(const json& j, junction::JunctionGeometry& v);
json encode(const junction::JunctionPrediction& v);
void decode(const json& j, junction::JunctionPrediction& v);
json encode(const qubit::TransmonParams& v);
void decode(const json& j, qubit::TransmonParams& v);
json encode(const qubit::CoherenceRecord& v);
void decode(const json& j, qubit::CoherenceRecord& v);
json encode(const XyPoint& v);
void decode(const json& j, XyPoint& v);
json encode(const FilmRow& v);
void decode(const json& j, FilmRow& v);
json encode(const CalibrationRow& v);
void decode(const json& j, CalibrationRow& v);
json encode(const ResonatorRow& v);
void decode(const json& j, ResonatorRow& v);
json encode(const QubitRow& v);
void decode(const json& j, QubitRow& v);
json encode(const QiPowerRow& v);
void decode(const json& j, QiPowerRow& v);
json encode(const QiTemperatureRow& v);
void decode(const json& j, QiTemperatureRow& v);
json encode(const AnnealRow& v);
void decode(const json& j, AnnealRow& v);
json encode(const ExposureRow& v);
void decode(const json& j, ExposureRow& v);
json encode(const ErrorRow& v);
void decode(const json& j, ErrorRow& v);
json encode(const Provenance& v);
void decode(const json& j, Provenance& v);
json encode(const AnalysisReport& v);
void decode(const json& j, AnalysisReport& v);
template <typename T> json encode(const std::optional<T>& v);
template <typename T> json encode(const std::vector<T>& v);
template <typename T> void decode(const json& j, std::optional<T>& v);
template <typename T> void decode(const json& j, std::vector<T>& v);

template <typename T> void write_field(json& j, const char* key, const T& v) { j[key] = encode(v); }

template <typename T> void read_field(const json& j, const char* key, T& v) {
    const auto it = j.find(key);
    if (it == j.end()) throw SchemaError(std::string("report is missing field '") + key + "'");
    try {
        decode(*it, v);
    } catch (const SchemaError& e) {
        throw SchemaError(std::string("field '") + key + "': " + e.what());
    }
}

#define W(f) write_field(j, #f, v.f)
#define R(f) read_field(j, #f, v.f)

#define SCQ_STRUCT(Type, FIELDS)                                                       \
    json encode(const Type& v) {                                                       \
        json j = json::object();                                                       \
        FIELDS(W);                                                                     \
        return j;                                                                      \
    }                                                                                  \
    void decode(const json& j, Type& v) {                                              \
        if (!j.is_object()) throw SchemaError("expected an object for " #Type);        \
        FIELDS(R);                                                                     \
    }

#define INPUT_REF(X) X(role); X(source); X(digest)
#define FILM_REPORT(X)                                                                 \
    X(tc); X(tc_width); X(rrr); X(delta0); X(delta_tc_from_bulk); X(rho0);             \
    X(sheet_resistance); X(kinetic_inductance); X(london_depth); X(above_bulk)
#define CALIBRATION(X)                                                                 \
    X(wafer_id); X(specific_resistance); X(dimension_bias); X(icrn_product); X(jc);    \
    X(oxidation_exposure); X(spacer_process); X(tc); X(icrn_suppression)
#define GEOMETRY(X) X(design_width); X(design_height); X(dimension_bias)
#define PREDICTION(X) X(effective_area); X(rn); X(ic); X(l_j); X(ej_over_h)
#define TRANSMON(X)                                                                    \
    X(ej_over_h); X(ec_over_h); X(f01); X(anharmonicity); X(c_sigma);                  \
    X(junction_capacitance); X(participation_pj); X(transmon_regime)
#define COHERENCE(X)                                                                   \
    X(f_q); X(t1); X(t2_star); X(t2_echo); X(q1); X(q2_star); X(q2_echo);              \
    X(temperature); X(t2_star_exceeds_limit); X(echo_below_ramsey)
#define XY(X) X(x); X(y)
#define FILM_ROW(X) X(wafer_id); X(source); X(digest); X(film)
#define CALIBRATION_ROW(X)                                                             \
    X(wafer_id); X(digest); X(inputs); X(calibration);                                 \
    X(specific_resistance_uncertainty); X(dimension_bias_uncertainty); X(ic); X(rn)
#define RESONATOR_ROW(X)                                                               \
    X(wafer_id); X(source); X(digest); X(f0); X(q_total); X(q_internal);               \
    X(q_external); X(phi); X(photon_number); X(f0_uncertainty);                        \
    X(q_internal_uncertainty); X(q_external_uncertainty); X(reduced_chi2); X(flagged)
#define QUBIT_ROW(X)                                                                   \
    X(wafer_id); X(qubit_id); X(digest); X(inputs); X(record); X(t1_uncertainty);      \
    X(t2_star_uncertainty); X(t2_echo_uncertainty); X(ramsey_detuning);                \
    X(t1_unbounded); X(no_fringe); X(geometry); X(junction); X(transmon)
#define QI_POWER_ROW(X)                                                                \
    X(wafer_id); X(source); X(digest); X(temperature); X(frequency); X(f_delta0);      \
    X(n_c); X(beta); X(q_other); X(model); X(rank_warning); X(points)
#define QI_TEMP_ROW(X)                                                                 \
    X(wafer_id); X(source); X(digest); X(frequency); X(tc); X(photon_number);          \
    X(q_other); X(f_delta0); X(alpha_kin); X(n_c); X(beta); X(points)
#define ANNEAL_ROW(X)                                                                  \
    X(wafer_id); X(source); X(digest); X(alpha); X(tau); X(alpha_uncertainty);         \
    X(tau_uncertainty); X(points)
#define EXPOSURE_ROW(X)                                                                \
    X(wafer_id); X(source); X(digest); X(spacer_process); X(prefactor); X(exponent);   \
    X(prefactor_uncertainty); X(exponent_uncertainty); X(points)
#define ERROR_ROW(X) X(wafer_id); X(stage); X(source); X(message)
#define PROVENANCE(X) X(source); X(kind); X(digest)
#define REPORT(X)                                                                      \
    X(schema_version); X(toolkit_version); X(created_at); X(wafer_id); X(status);      \
    X(film); X(calibrations); X(resonators); X(qubits); X(qi_power);                   \
    X(qi_temperature); X(anneals); X(exposures); X(errors); X(provenance)

SCQ_STRUCT(InputRef, INPUT_REF)
SCQ_STRUCT(film::FilmReport, FILM_REPORT)
SCQ_STRUCT(junction::WaferCalibration, CALIBRATION)
SCQ_STRUCT(junction::JunctionGeometry, GEOMETRY)
SCQ_STRUCT(junction::JunctionPrediction, PREDICTION)
SCQ_STRUCT(qubit::TransmonParams, TRANSMON)
SCQ_STRUCT(qubit::CoherenceRecord, COHERENCE)
SCQ_STRUCT(XyPoint, XY)
SCQ_STRUCT(FilmRow, FILM_ROW)
SCQ_STRUCT(CalibrationRow, CALIBRATION_ROW)
SCQ_STRUCT(ResonatorRow, RESONATOR_ROW)
SCQ_STRUCT(QubitRow, QUBIT_ROW)
SCQ_STRUCT(QiPowerRow, QI_POWER_ROW)
SCQ_STRUCT(QiTemperatureRow, QI_TEMP_ROW)
SCQ_STRUCT(AnnealRow, ANNEAL_ROW)
SCQ_STRUCT(ExposureRow, EXPOSURE_ROW)
SCQ_STRUCT(ErrorRow, ERROR_ROW)
SCQ_STRUCT(Provenance, PROVENANCE)
SCQ_STRUCT(AnalysisReport, REPORT)

template <typename T> json encode(const std::optional<T>& v) { return v ? encode(*v) : json(nullptr); }

template <typename T> json encode(const std::vector<T>& v) {
    json a = json::array();
    for (const auto& e : v) a.push_back(encode(e));
    return a;
}

template <typename T> void decode(const json& j, std::optional<T>& v) {
    if (j.is_null()) {
        v.reset();
        return;
    }
    T tmp{};
    decode(j, tmp);
    v = std::move(tmp);
}

template <typename T> void decode(const json& j, std::vector<T>& v) {
    if (!j.is_array()) throw SchemaError("expected an array");
    v.clear();
    for (const auto& e : j) {
        T tmp{};
        decode(e, tmp);
        v.push_back(std::move(tmp));
    }
}

} // namespace

bool AnalysisReport::empty() const {
    return film.empty() && calibrations.empty() && resonators.empty() && qubits.empty() && qi_power.empty() &&
           qi_temperature.empty() && anneals.empty() && exposures.empty();
}

std::string toolkit_version() { return SCQ_VERSION; }

std::string serialize(const AnalysisReport& report) { return encode(report).dump(2) + "\n"; }

AnalysisReport parse(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("report is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw SchemaError("report must be a JSON object");
    int version = 0;
    read_field(j, "schema_version", version);
    if (version != kSchemaVersion) {
        throw SchemaError("unsupported report schema version " + std::to_string(version));
    }
    AnalysisReport r;
    decode(j, r);
    return r;
}

AnalysisReport load(const std::filesystem::path& path) { return parse(io::read_file(path)); }

void save(const std::filesystem::path& path, const AnalysisReport& report) {
    io::write_file_atomic(path, serialize(report));
}

} // namespace scq::report
