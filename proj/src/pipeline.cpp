#include "scq/pipeline.hpp"

#include "scq/digest.hpp"
#include "scq/errors.hpp"
#include "scq/physics.hpp"
#include "scq/trace_file.hpp"
#include "scq/units.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <tuple>
#include <variant>

namespace scq::pipeline {

using nlohmann::json;
using report::AnalysisReport;
using report::ErrorRow;
using units::Dimension;

namespace {

// ---- configuration parsing -------------------------------------------------

double quantity(const json& j, std::string_view what, Dimension d) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        try {
            return units::parse_quantity(j.get<std::string>(), d);
        } catch (const SchemaError& e) {
            throw ConfigError(std::string(what) + ": " + e.what());
        }
    }
    throw ConfigError(std::string(what) + " must be a number or a quantity string");
}

std::string string_field(const json& j, const char* key, std::string_view ctx) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        throw ConfigError(std::string(ctx) + ": '" + key + "' must be a string");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& j, const char* key, std::string_view ctx) {
    if (!j.contains(key)) return std::nullopt;
    return string_field(j, key, ctx);
}

std::vector<std::string> string_list(const json& j, const char* key, std::string_view ctx) {
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    const json& v = j.at(key);
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw ConfigError(std::string(ctx) + ": '" + key + "' must be a list of file names");
    for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError(std::string(ctx) + ": '" + key + "' entries must be strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view ctx) {
    for (const auto& [k, v] : j.items()) {
        if (std::find(known.begin(), known.end(), k) == known.end()) {
            throw ConfigError(std::string(ctx) + ": unknown key '" + k + "'");
        }
    }
}

WaferInput parse_wafer(const json& w, std::size_t index) {
    const std::string ctx = "wafers[" + std::to_string(index) + "]";
    if (!w.is_object()) throw ConfigError(ctx + " must be an object");
    reject_unknown(w,
                   {"wafer_id", "rt", "areas", "iv", "oxidation_exposure", "spacer_process", "resonators", "qubits",
                    "qi_power", "qi_temp", "anneal", "exposure"},
                   ctx);
    WaferInput in;
    in.wafer_id = string_field(w, "wafer_id", ctx);
    in.rt = optional_string(w, "rt", ctx);
    in.areas = optional_string(w, "areas", ctx);
    in.iv = optional_string(w, "iv", ctx);
    if (w.contains("oxidation_exposure")) {
        in.oxidation_exposure = quantity(w.at("oxidation_exposure"), ctx + ".oxidation_exposure", Dimension::Exposure);
    }
    if (w.contains("spacer_process")) {
        in.spacer_process = string_field(w, "spacer_process", ctx);
        try {
            (void)junction::spacer_process_from_string(in.spacer_process);
        } catch (const std::exception& e) {
            throw ConfigError(ctx + ": " + e.what());
        }
    }
    if (w.contains("resonators")) {
        const json& list = w.at("resonators");
        if (!list.is_array()) throw ConfigError(ctx + ".resonators must be a list");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string rctx = ctx + ".resonators[" + std::to_string(k) + "]";
            ResonatorInput r;
            if (list[k].is_string()) {
                r.s21 = list[k].get<std::string>();
            } else if (list[k].is_object()) {
                reject_unknown(list[k], {"s21", "power_at_chip"}, rctx);
                r.s21 = string_field(list[k], "s21", rctx);
                if (list[k].contains("power_at_chip")) {
                    r.power_at_chip = quantity(list[k].at("power_at_chip"), rctx + ".power_at_chip", Dimension::Power);
                }
            } else {
                throw ConfigError(rctx + " must be a file name or an object");
            }
            in.resonators.push_back(std::move(r));
        }
    }
    if (w.contains("qubits")) {
        const json& list = w.at("qubits");
        if (!list.is_array()) throw ConfigError(ctx + ".qubits must be a list");
        for (std::size_t k = 0; k < list.size(); ++k) {
            const std::string qctx = ctx + ".qubits[" + std::to_string(k) + "]";
            const json& q = list[k];
            if (!q.is_object()) throw ConfigError(qctx + " must be an object");
            reject_unknown(q, {"id", "t1", "ramsey", "echo", "f_q", "design"}, qctx);
            QubitInput qi;
            qi.id = string_field(q, "id", qctx);
            qi.t1 = string_field(q, "t1", qctx);
            qi.ramsey = optional_string(q, "ramsey", qctx);
            qi.echo = optional_string(q, "echo", qctx);
            if (q.contains("f_q")) qi.f_q = quantity(q.at("f_q"), qctx + ".f_q", Dimension::Frequency);
            if (q.contains("design")) {
                const json& d = q.at("design");
                if (!d.is_object()) throw ConfigError(qctx + ".design must be an object");
                reject_unknown(d, {"width", "height", "c_sigma"}, qctx + ".design");
                for (const char* key : {"width", "height", "c_sigma"}) {
                    if (!d.contains(key)) throw ConfigError(qctx + ".design is missing '" + key + "'");
                }
                qi.design = QubitDesign{quantity(d.at("width"), qctx + ".design.width", Dimension::Length),
                                        quantity(d.at("height"), qctx + ".design.height", Dimension::Length),
                                        quantity(d.at("c_sigma"), qctx + ".design.c_sigma", Dimension::Capacitance)};
            }
            in.qubits.push_back(std::move(qi));
        }
    }
    in.qi_power = string_list(w, "qi_power", ctx);
    in.qi_temp = string_list(w, "qi_temp", ctx);
    in.anneal = string_list(w, "anneal", ctx);
    in.exposure = string_list(w, "exposure", ctx);
    return in;
}

// ---- execution helpers -----------------------------------------------------

struct Loaded {
    io::TraceFile file;
    std::string digest;
};

struct ProvenanceSink {
    std::mutex mu;
    std::set<std::tuple<std::string, std::string, std::string>> entries;

    void add(const std::string& source, io::TraceKind kind, const std::string& digest) {
        std::lock_guard lock(mu);
        entries.emplace(source, std::string(io::to_string(kind)), digest);
    }
};

Loaded load(const std::filesystem::path& base, const std::string& source, io::TraceKind kind, ProvenanceSink& prov) {
    const std::filesystem::path path = base / source;
    if (!std::filesystem::exists(path)) throw std::runtime_error("input file not found: '" + source + "'");
    const std::string bytes = io::read_file(path);
    Loaded out{io::parse_trace(bytes, kind, source), io::sha256_hex(bytes)};
    prov.add(source, kind, out.digest);
    return out;
}

/// A unit of work producing either a typed row or an error row.
template <typename Row> struct Slot {
    std::optional<Row> row;
    std::optional<ErrorRow> error;
};

template <typename Row, typename Fn>
void guarded(Slot<Row>& slot, const std::string& wafer, const char* stage, const std::string& source, Fn&& fn) {
    try {
        slot.row = fn();
    } catch (const std::exception& e) {
        slot.error = ErrorRow{wafer, stage, source, e.what()};
    }
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<report::XyPoint> xy(const std::vector<resonator::QiPoint>& pts) {
    std::vector<report::XyPoint> out;
    for (const auto& p : pts) out.push_back({p.x, p.q_i});
    return out;
}

struct IvResult {
    rcsj::IvParameters params;
    std::string digest;
};

struct AreaResult {
    junction::AreaFit fit;
    std::string digest;
};

} // namespace

PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    reject_unknown(j, {"created_at", "workers", "wafers"}, "configuration");
    PipelineConfig cfg;
    cfg.base_dir = base_dir;
    cfg.created_at = optional_string(j, "created_at", "configuration");
    if (j.contains("workers")) {
        if (!j.at("workers").is_number_unsigned() || j.at("workers").get<std::size_t>() == 0) {
            throw ConfigError("'workers' must be a positive integer");
        }
        cfg.workers = j.at("workers").get<std::size_t>();
    }
    if (!j.contains("wafers") || !j.at("wafers").is_array()) throw ConfigError("'wafers' must be a list");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.at("wafers").size(); ++i) {
        cfg.wafers.push_back(parse_wafer(j.at("wafers")[i], i));
        if (!ids.insert(cfg.wafers.back().wafer_id).second) {
            throw ConfigError("duplicate wafer_id '" + cfg.wafers.back().wafer_id + "'");
        }
    }
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.parent_path());
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task) {
    const std::size_t threads = std::min(std::max<std::size_t>(workers, 1), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) task(i);
        });
    }
}

AnalysisReport run_pipeline(const PipelineConfig& config, const RunOptions& options) {
    using io::TraceKind;
    const auto& base = config.base_dir;
    const std::size_t workers = std::max<std::size_t>(options.workers, 1);
    ProvenanceSink prov;
    AnalysisReport rep;
    rep.toolkit_version = report::toolkit_version();
    rep.created_at = options.created_at ? *options.created_at : config.created_at.value_or(utc_now());

    const std::size_t nw = config.wafers.size();

    // Stage 1: film, area scaling and IV per wafer.
    std::vector<Slot<report::FilmRow>> film(nw);
    std::vector<Slot<AreaResult>> areas(nw);
    std::vector<Slot<IvResult>> ivs(nw);
    parallel_for(3 * nw, workers, [&](std::size_t task) {
        const auto& w = config.wafers[task / 3];
        const std::size_t i = task / 3;
        switch (task % 3) {
        case 0:
            if (!w.rt) return;
            guarded(film[i], w.wafer_id, "film", *w.rt, [&] {
                const Loaded l = load(base, *w.rt, TraceKind::Rt, prov);
                return report::FilmRow{w.wafer_id, *w.rt, l.digest, film::analyze(io::to_rt_trace(l.file))};
            });
            break;
        case 1:
            if (!w.areas) return;
            guarded(areas[i], w.wafer_id, "calibration", *w.areas, [&] {
                const Loaded l = load(base, *w.areas, TraceKind::Areas, prov);
                return AreaResult{junction::fit_area_scaling(io::to_area_samples(l.file)), l.digest};
            });
            break;
        default:
            if (!w.iv) return;
            guarded(ivs[i], w.wafer_id, "calibration", *w.iv, [&] {
                const Loaded l = load(base, *w.iv, TraceKind::Iv, prov);
                return IvResult{rcsj::extract_iv_parameters(io::to_iv_traces(l.file).first), l.digest};
            });
            break;
        }
    });

    // Stage 2: calibrations (needs areas and IV; tc from the film when present).
    std::vector<std::optional<report::CalibrationRow>> cals(nw);
    std::vector<ErrorRow> errors;
    for (std::size_t i = 0; i < nw; ++i) {
        const auto& w = config.wafers[i];
        if (!areas[i].row || !ivs[i].row) continue;
        try {
            const double tc = film[i].row ? film[i].row->film.tc : 0.0;
            auto cal = junction::WaferCalibration::make(
                w.wafer_id, areas[i].row->fit.specific_resistance, areas[i].row->fit.dimension_bias,
                ivs[i].row->params.icrn_product, w.oxidation_exposure,
                junction::spacer_process_from_string(w.spacer_process), tc);
            if (tc > 0.0) {
                cal.icrn_suppression =
                    junction::icrn_suppression(cal.icrn_product, delta0_from_tc(tc), 0.0);
            }
            report::CalibrationRow row;
            row.wafer_id = w.wafer_id;
            row.digest = areas[i].row->digest;
            row.inputs = {{"areas", *w.areas, areas[i].row->digest}, {"iv", *w.iv, ivs[i].row->digest}};
            row.calibration = std::move(cal);
            row.specific_resistance_uncertainty = areas[i].row->fit.result.uncertainty("specific_resistance");
            row.dimension_bias_uncertainty = areas[i].row->fit.result.uncertainty("dimension_bias");
            row.ic = ivs[i].row->params.ic;
            row.rn = ivs[i].row->params.rn;
            cals[i] = std::move(row);
        } catch (const std::exception& e) {
            errors.push_back({w.wafer_id, "calibration", *w.areas, e.what()});
        }
    }

    // Stage 3: junction predictions for every qubit design on a calibrated wafer.
    struct QubitRef {
        std::size_t wafer;
        std::size_t qubit;
    };
    std::vector<QubitRef> qrefs;
    for (std::size_t i = 0; i < nw; ++i) {
        for (std::size_t k = 0; k < config.wafers[i].qubits.size(); ++k) qrefs.push_back({i, k});
    }
    struct Prediction {
        junction::JunctionGeometry geometry;
        junction::JunctionPrediction junction;
        qubit::TransmonParams transmon;
    };
    std::vector<std::optional<Prediction>> predictions(qrefs.size());
    for (std::size_t q = 0; q < qrefs.size(); ++q) {
        const auto& w = config.wafers[qrefs[q].wafer];
        const auto& in = w.qubits[qrefs[q].qubit];
        const auto& cal = cals[qrefs[q].wafer];
        if (!in.design || !cal) continue;
        try {
            const auto geom = cal->calibration.geometry(in.design->width, in.design->height);
            predictions[q] = Prediction{geom, junction::predict_junction(geom, cal->calibration),
                                        qubit::transmon_from_design(in.design->c_sigma, geom, cal->calibration)};
        } catch (const std::exception& e) {
            errors.push_back({w.wafer_id, "prediction", in.id, e.what()});
        }
    }

    // Stage 4: resonator, qubit and auxiliary fits.
    struct FileRef {
        std::size_t wafer;
        std::size_t index;
    };
    std::vector<FileRef> rrefs, prefs, trefs, arefs, erefs;
    for (std::size_t i = 0; i < nw; ++i) {
        const auto& w = config.wafers[i];
        for (std::size_t k = 0; k < w.resonators.size(); ++k) rrefs.push_back({i, k});
        for (std::size_t k = 0; k < w.qi_power.size(); ++k) prefs.push_back({i, k});
        for (std::size_t k = 0; k < w.qi_temp.size(); ++k) trefs.push_back({i, k});
        for (std::size_t k = 0; k < w.anneal.size(); ++k) arefs.push_back({i, k});
        for (std::size_t k = 0; k < w.exposure.size(); ++k) erefs.push_back({i, k});
    }
    std::vector<Slot<report::ResonatorRow>> res(rrefs.size());
    std::vector<Slot<report::QubitRow>> qubits(qrefs.size());
    std::vector<Slot<report::QiPowerRow>> qip(prefs.size());
    std::vector<Slot<report::QiTemperatureRow>> qit(trefs.size());
    std::vector<Slot<report::AnnealRow>> ann(arefs.size());
    std::vector<Slot<report::ExposureRow>> exq(erefs.size());

    const std::size_t o1 = rrefs.size();
    const std::size_t o2 = o1 + qrefs.size();
    const std::size_t o3 = o2 + prefs.size();
    const std::size_t o4 = o3 + trefs.size();
    const std::size_t o5 = o4 + arefs.size();
    const std::size_t total = o5 + erefs.size();

    parallel_for(total, workers, [&](std::size_t task) {
        if (task < o1) {
            const auto& w = config.wafers[rrefs[task].wafer];
            const auto& in = w.resonators[rrefs[task].index];
            guarded(res[task], w.wafer_id, "resonator", in.s21, [&] {
                const Loaded l = load(base, in.s21, TraceKind::S21, prov);
                const auto fit = resonator::fit_s21(io::to_s21_trace(l.file));
                report::ResonatorRow row;
                row.wafer_id = w.wafer_id;
                row.source = in.s21;
                row.digest = l.digest;
                row.f0 = fit.f0;
                row.q_total = fit.q_total;
                row.q_internal = fit.q_internal;
                row.q_external = fit.q_external_mag;
                row.phi = fit.phi;
                const auto power = in.power_at_chip ? in.power_at_chip : l.file.quantity("power_at_chip", Dimension::Power);
                if (power) row.photon_number = resonator::photon_number(fit, *power);
                row.f0_uncertainty = fit.f0_uncertainty;
                row.q_internal_uncertainty = fit.q_internal_uncertainty;
                row.q_external_uncertainty = fit.q_external_uncertainty;
                row.reduced_chi2 = fit.result.reduced_chi2;
                row.flagged = fit.flagged;
                return row;
            });
        } else if (task < o2) {
            const std::size_t q = task - o1;
            const auto& w = config.wafers[qrefs[q].wafer];
            const auto& in = w.qubits[qrefs[q].qubit];
            guarded(qubits[q], w.wafer_id, "qubit", in.t1, [&] {
                report::QubitRow row;
                row.wafer_id = w.wafer_id;
                row.qubit_id = in.id;
                const Loaded t1 = load(base, in.t1, TraceKind::Decay, prov);
                row.digest = t1.digest;
                row.inputs.push_back({"t1", in.t1, t1.digest});
                const auto f_q = in.f_q ? in.f_q : t1.file.quantity("f_q", Dimension::Frequency);
                if (!f_q) throw AnalysisError("qubit frequency not given in the configuration or the T1 header");
                const double temperature = t1.file.quantity("temperature", Dimension::Temperature).value_or(0.0);
                const auto d1 = qubit::fit_t1(io::to_decay_trace(t1.file));
                row.t1_uncertainty = d1.time_constant_uncertainty;
                row.t1_unbounded = d1.unbounded;
                double t2s = 0.0, t2e = 0.0;
                if (in.ramsey) {
                    const Loaded r = load(base, *in.ramsey, TraceKind::Ramsey, prov);
                    row.inputs.push_back({"ramsey", *in.ramsey, r.digest});
                    const auto fr = qubit::fit_ramsey(io::to_decay_trace(r.file));
                    t2s = fr.t2_star;
                    row.t2_star_uncertainty = fr.t2_star_uncertainty;
                    row.ramsey_detuning = fr.detuning;
                    row.no_fringe = fr.no_fringe;
                }
                if (in.echo) {
                    const Loaded e = load(base, *in.echo, TraceKind::Decay, prov);
                    row.inputs.push_back({"echo", *in.echo, e.digest});
                    const auto fe = qubit::fit_echo(io::to_decay_trace(e.file));
                    t2e = fe.time_constant;
                    row.t2_echo_uncertainty = fe.time_constant_uncertainty;
                }
                row.record = qubit::CoherenceRecord::make(*f_q, d1.time_constant, t2s, t2e, temperature);
                if (predictions[q]) {
                    row.geometry = predictions[q]->geometry;
                    row.junction = predictions[q]->junction;
                    row.transmon = predictions[q]->transmon;
                }
                return row;
            });
        } else if (task < o3) {
            const auto ref = prefs[task - o2];
            const auto& w = config.wafers[ref.wafer];
            const auto& src = w.qi_power[ref.index];
            guarded(qip[task - o2], w.wafer_id, "qi_power", src, [&] {
                const Loaded l = load(base, src, TraceKind::QiPower, prov);
                const auto t = l.file.quantity("temperature", Dimension::Temperature);
                const auto f = l.file.quantity("frequency", Dimension::Frequency);
                if (!t || !f) throw AnalysisError("Q_i power sweep needs 'temperature' and 'frequency' header entries");
                const auto pts = io::to_qi_points(l.file);
                const auto fit = resonator::fit_qi_vs_power(pts, *t, *f);
                report::QiPowerRow row;
                row.wafer_id = w.wafer_id;
                row.source = src;
                row.digest = l.digest;
                row.temperature = *t;
                row.frequency = *f;
                row.f_delta0 = fit.tls.f_delta0;
                row.n_c = fit.tls.n_c;
                row.beta = fit.tls.beta;
                row.q_other = fit.q_other;
                row.model = fit.selected == resonator::PowerModel::ConstantOnly ? "constant_only" : "tls_plus_constant";
                row.rank_warning = fit.rank_warning;
                row.points = xy(pts);
                return row;
            });
        } else if (task < o4) {
            const auto ref = trefs[task - o3];
            const auto& w = config.wafers[ref.wafer];
            const auto& src = w.qi_temp[ref.index];
            guarded(qit[task - o3], w.wafer_id, "qi_temperature", src, [&] {
                const Loaded l = load(base, src, TraceKind::QiTemp, prov);
                const auto f = l.file.quantity("frequency", Dimension::Frequency);
                const auto n = l.file.quantity("photon_number", Dimension::Dimensionless);
                auto tc = l.file.quantity("tc", Dimension::Temperature);
                if (!tc && film[ref.wafer].row) tc = film[ref.wafer].row->film.tc;
                if (!f || !n) throw AnalysisError("Q_i temperature sweep needs 'frequency' and 'photon_number' headers");
                if (!tc) throw AnalysisError("Q_i temperature sweep needs a 'tc' header or a film result on the wafer");
                const auto pts = io::to_qi_points(l.file);
                const resonator::QiTemperatureOptions opts;
                const auto fit = resonator::fit_qi_vs_temperature(pts, *f, *tc, *n, opts);
                report::QiTemperatureRow row;
                row.wafer_id = w.wafer_id;
                row.source = src;
                row.digest = l.digest;
                row.frequency = *f;
                row.tc = *tc;
                row.photon_number = *n;
                row.q_other = fit.q_other;
                row.f_delta0 = fit.f_delta0;
                row.alpha_kin = fit.alpha_kin;
                row.n_c = opts.n_c;
                row.beta = opts.beta;
                row.points = xy(pts);
                return row;
            });
        } else if (task < o5) {
            const auto ref = arefs[task - o4];
            const auto& w = config.wafers[ref.wafer];
            const auto& src = w.anneal[ref.index];
            guarded(ann[task - o4], w.wafer_id, "anneal", src, [&] {
                const Loaded l = load(base, src, TraceKind::Anneal, prov);
                const auto pts = io::to_anneal_points(l.file);
                const auto fit = junction::fit_annealing(pts);
                report::AnnealRow row;
                row.wafer_id = w.wafer_id;
                row.source = src;
                row.digest = l.digest;
                row.alpha = fit.alpha;
                row.tau = fit.tau;
                row.alpha_uncertainty = fit.result.uncertainty("alpha");
                row.tau_uncertainty = fit.result.uncertainty("tau");
                for (const auto& p : pts) row.points.push_back({p.time, p.jc_ratio});
                return row;
            });
        } else {
            const auto ref = erefs[task - o5];
            const auto& w = config.wafers[ref.wafer];
            const auto& src = w.exposure[ref.index];
            guarded(exq[task - o5], w.wafer_id, "exposure", src, [&] {
                const Loaded l = load(base, src, TraceKind::Exposure, prov);
                const auto pts = io::to_exposure_points(l.file);
                const auto fit = junction::fit_exposure_law(pts);
                report::ExposureRow row;
                row.wafer_id = w.wafer_id;
                row.source = src;
                row.digest = l.digest;
                row.spacer_process = junction::spacer_process_from_string(
                    l.file.header_value("spacer_process").value_or(w.spacer_process));
                row.prefactor = fit.prefactor;
                row.exponent = fit.exponent;
                row.prefactor_uncertainty = fit.prefactor_uncertainty;
                row.exponent_uncertainty = fit.exponent_uncertainty;
                for (const auto& p : pts) row.points.push_back({p.exposure, p.jc});
                return row;
            });
        }
    });

    // Assembly (single writer, deterministic order).
    const auto collect = [&errors](auto& slots, auto& out) {
        for (auto& s : slots) {
            if (s.row) out.push_back(std::move(*s.row));
            if (s.error) errors.push_back(std::move(*s.error));
        }
    };
    for (auto& s : areas) {
        if (s.error) errors.push_back(*s.error);
    }
    for (auto& s : ivs) {
        if (s.error) errors.push_back(*s.error);
    }
    collect(film, rep.film);
    for (auto& c : cals) {
        if (c) rep.calibrations.push_back(std::move(*c));
    }
    collect(res, rep.resonators);
    collect(qubits, rep.qubits);
    collect(qip, rep.qi_power);
    collect(qit, rep.qi_temperature);
    collect(ann, rep.anneals);
    collect(exq, rep.exposures);

    const auto by_key = [](const auto& a, const auto& b) {
        return std::tie(a.wafer_id, a.digest) < std::tie(b.wafer_id, b.digest);
    };
    std::stable_sort(rep.film.begin(), rep.film.end(), by_key);
    std::stable_sort(rep.calibrations.begin(), rep.calibrations.end(), by_key);
    std::stable_sort(rep.resonators.begin(), rep.resonators.end(), by_key);
    std::stable_sort(rep.qubits.begin(), rep.qubits.end(), [](const auto& a, const auto& b) {
        return std::tie(a.wafer_id, a.digest, a.qubit_id) < std::tie(b.wafer_id, b.digest, b.qubit_id);
    });
    std::stable_sort(rep.qi_power.begin(), rep.qi_power.end(), by_key);
    std::stable_sort(rep.qi_temperature.begin(), rep.qi_temperature.end(), by_key);
    std::stable_sort(rep.anneals.begin(), rep.anneals.end(), by_key);
    std::stable_sort(rep.exposures.begin(), rep.exposures.end(), by_key);
    std::sort(errors.begin(), errors.end(), [](const ErrorRow& a, const ErrorRow& b) {
        return std::tie(a.wafer_id, a.stage, a.source, a.message) < std::tie(b.wafer_id, b.stage, b.source, b.message);
    });
    rep.errors = std::move(errors);
    for (const auto& [source, kind, digest] : prov.entries) rep.provenance.push_back({source, kind, digest});

    std::vector<std::string> ids;
    for (const auto& w : config.wafers) ids.push_back(w.wafer_id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) rep.wafer_id += (i ? "+" : "") + ids[i];
    rep.status = rep.errors.empty() ? "complete" : "partial";
    return rep;
}

int exit_code(const AnalysisReport& report) { return report.status == "complete" ? 0 : 2; }

} // namespace scq::pipeline
