// Command-line front end: one verb per analysis plus the batch pipeline.

#include "scq/constants.hpp"
#include "scq/digest.hpp"
#include "scq/errors.hpp"
#include "scq/film.hpp"
#include "scq/junction.hpp"
#include "scq/physics.hpp"
#include "scq/pipeline.hpp"
#include "scq/plot.hpp"
#include "scq/qubit.hpp"
#include "scq/rcsj.hpp"
#include "scq/report.hpp"
#include "scq/resonator.hpp"
#include "scq/synthetic.hpp"
#include "scq/trace_file.hpp"
#include "scq/units.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

namespace {

using nlohmann::json;
using scq::units::Dimension;

struct Globals {
    std::string in;
    std::string out;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
};

json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json fit_json(const scq::fit::FitResult& r) {
    json params = json::object();
    json sigmas = json::object();
    for (std::size_t i = 0; i < r.names.size(); ++i) {
        params[r.names[i]] = num(r.params[i]);
        sigmas[r.names[i]] = num(r.param_uncertainties[i]);
    }
    return {{"params", params},       {"uncertainties", sigmas},       {"reduced_chi2", num(r.reduced_chi2)},
            {"converged", r.converged}, {"rank_deficient", r.rank_deficient}, {"iterations", r.iterations},
            {"message", r.message}};
}

void emit(const Globals& g, const json& j) {
    const std::string text = j.dump(2) + "\n";
    if (g.out.empty()) {
        std::cout << text;
    } else {
        scq::io::write_file_atomic(g.out, text);
    }
}

void require_in(const Globals& g) {
    if (g.in.empty()) throw scq::ConfigError("--in is required for this command");
}

double q(const std::string& text, Dimension d, const char* flag) {
    try {
        return scq::units::parse_quantity(text, d);
    } catch (const scq::SchemaError& e) {
        throw scq::ConfigError(std::string(flag) + ": " + e.what());
    }
}

std::optional<double> q_opt(const std::string& text, Dimension d, const char* flag) {
    if (text.empty()) return std::nullopt;
    return q(text, d, flag);
}

json film_json(const scq::film::FilmReport& f) {
    return {{"tc", num(f.tc)},
            {"tc_width", num(f.tc_width)},
            {"rrr", num(f.rrr)},
            {"delta0_eV", num(f.delta0)},
            {"delta_tc_from_bulk", num(f.delta_tc_from_bulk)},
            {"above_bulk", f.above_bulk},
            {"rho0", opt(f.rho0)},
            {"sheet_resistance", opt(f.sheet_resistance)},
            {"kinetic_inductance", opt(f.kinetic_inductance)},
            {"london_depth", opt(f.london_depth)}};
}

json decay_json(const scq::qubit::DecayFit& d, std::optional<double> f_q) {
    json j = {{"time_constant", num(d.time_constant)},
              {"time_constant_uncertainty", num(d.time_constant_uncertainty)},
              {"amplitude", num(d.amplitude)},
              {"offset", num(d.offset)},
              {"unbounded", d.unbounded},
              {"fit", fit_json(d.result)}};
    if (f_q) j["quality_factor"] = num(scq::qubit::quality_factor(*f_q, d.time_constant));
    return j;
}

std::optional<double> qubit_frequency(const std::string& flag, const scq::io::TraceFile& file) {
    if (!flag.empty()) return q(flag, Dimension::Frequency, "--f-q");
    return file.quantity("f_q", Dimension::Frequency);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Superconducting junction, film, resonator and transmon characterization toolkit"};
    app.set_version_flag("--version", scq::report::toolkit_version());
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--in", g.in, "Input file (trace, report or configuration)");
    app.add_option("--out", g.out, "Output file or directory");
    app.add_option("--config", g.config, "Pipeline configuration (JSON)");
    app.add_option("--seed", g.seed, "Seed for randomized generators")->capture_default_str();
    app.add_option("--workers", g.workers, "Worker threads for the pipeline")->check(CLI::PositiveNumber);

    std::function<void()> action;

    // film
    auto* film_cmd = app.add_subcommand("film", "Tc, width, RRR and kinetic parameters from an R(T) trace");
    film_cmd->callback([&] {
        action = [&] {
            require_in(g);
            const auto file = scq::io::ingest(g.in, scq::io::TraceKind::Rt);
            emit(g, film_json(scq::film::analyze(scq::io::to_rt_trace(file))));
        };
    });

    // junction
    auto* jn = app.add_subcommand("junction", "Junction calibration and simulation");
    jn->require_subcommand(1);
    auto* fit_area = jn->add_subcommand("fit-area", "Specific resistance and dimension bias from an area series");
    fit_area->callback([&] {
        action = [&] {
            require_in(g);
            const auto fit = scq::junction::fit_area_scaling(
                scq::io::to_area_samples(scq::io::ingest(g.in, scq::io::TraceKind::Areas)));
            emit(g, {{"specific_resistance", num(fit.specific_resistance)},
                     {"dimension_bias", num(fit.dimension_bias)},
                     {"resistance_spread", num(fit.resistance_spread)},
                     {"fit", fit_json(fit.result)}});
        };
    });

    std::string rho_s, icrn;
    auto* jc = jn->add_subcommand("jc", "Critical current density from specific resistance and IcRn product");
    jc->add_option("--specific-resistance", rho_s, "e.g. '1.5e-12 ohm_m2' or '1.5 ohm_um2'")->required();
    jc->add_option("--icrn", icrn, "IcRn product, e.g. '1.5 mV'")->required();
    jc->callback([&] {
        action = [&] {
            const double j = scq::junction::jc_from_calibration(q(rho_s, Dimension::SpecificResistance, "--specific-resistance"),
                                                                q(icrn, Dimension::Voltage, "--icrn"));
            emit(g, {{"jc_A_per_m2", num(j)}, {"jc_kA_per_cm2", num(j / 1e7)}});
        };
    });

    auto* anneal = jn->add_subcommand("anneal-fit", "Saturating J_c decay under annealing");
    anneal->callback([&] {
        action = [&] {
            require_in(g);
            const auto fit = scq::junction::fit_annealing(
                scq::io::to_anneal_points(scq::io::ingest(g.in, scq::io::TraceKind::Anneal)));
            emit(g, {{"alpha", num(fit.alpha)}, {"tau", num(fit.tau)}, {"fit", fit_json(fit.result)}});
        };
    });

    std::optional<double> fix_exponent;
    auto* expo = jn->add_subcommand("exposure-fit", "Power law J_c = K E^p versus oxygen exposure");
    expo->add_option("--fix-exponent", fix_exponent, "Hold the exponent (e.g. -0.5)");
    expo->callback([&] {
        action = [&] {
            require_in(g);
            const auto fit = scq::junction::fit_exposure_law(
                scq::io::to_exposure_points(scq::io::ingest(g.in, scq::io::TraceKind::Exposure)), fix_exponent);
            emit(g, {{"prefactor", num(fit.prefactor)},
                     {"prefactor_uncertainty", num(fit.prefactor_uncertainty)},
                     {"exponent", num(fit.exponent)},
                     {"exponent_uncertainty", num(fit.exponent_uncertainty)},
                     {"fit", fit_json(fit.result)}});
        };
    });

    std::string ic_s = "38 uA", rn_s = "39 ohm", cap_s, subgap_r = "8 kohm", gap_v = "2.8 mV";
    double beta_c = 25.0, i_max_factor = 2.5;
    int steps = 200;
    bool no_subgap = false;
    auto* iv = jn->add_subcommand("iv-sim", "RCSJ current-voltage sweep (up then down)");
    iv->add_option("--ic", ic_s, "Critical current")->capture_default_str();
    iv->add_option("--rn", rn_s, "Normal resistance")->capture_default_str();
    iv->add_option("--capacitance", cap_s, "Junction capacitance (overrides --beta-c)");
    iv->add_option("--beta-c", beta_c, "Stewart-McCumber parameter")->capture_default_str();
    iv->add_option("--i-max", i_max_factor, "Top bias in units of Ic")->capture_default_str();
    iv->add_option("--steps", steps, "Bias steps per direction (>= 100)")->capture_default_str();
    iv->add_option("--subgap-resistance", subgap_r, "Quasiparticle branch resistance")->capture_default_str();
    iv->add_option("--gap-voltage", gap_v, "Sum-gap voltage")->capture_default_str();
    iv->add_flag("--no-subgap", no_subgap, "Pure RCSJ with a constant shunt");
    iv->callback([&] {
        action = [&] {
            const double ic = q(ic_s, Dimension::Current, "--ic");
            const double rn = q(rn_s, Dimension::Resistance, "--rn");
            auto jj = scq::rcsj::with_beta_c(ic, rn, beta_c);
            if (!cap_s.empty()) jj.capacitance = q(cap_s, Dimension::Capacitance, "--capacitance");
            if (!no_subgap) {
                jj.subgap = scq::rcsj::SubgapBranch{q(subgap_r, Dimension::Resistance, "--subgap-resistance"),
                                                    q(gap_v, Dimension::Voltage, "--gap-voltage")};
            }
            if (steps < 100) throw scq::ConfigError("--steps must be at least 100");
            const auto sw = scq::rcsj::simulate_rcsj_iv(jj, {i_max_factor * ic, steps, true});
            if (!g.out.empty()) {
                std::vector<double> i, v, s;
                for (const auto* tr : {&sw.up, &sw.down}) {
                    for (const auto& p : tr->points) {
                        i.push_back(p.current);
                        v.push_back(p.voltage);
                        s.push_back(tr == &sw.up ? 0.0 : 1.0);
                    }
                }
                scq::io::write_trace(g.out, scq::io::make_trace(scq::io::TraceKind::Iv,
                                                                {{"current", i}, {"voltage", v}, {"sweep", s}},
                                                                {{"beta_c", std::to_string(sw.beta_c)}}));
            }
            const json summary = {{"beta_c", num(sw.beta_c)},
                                  {"switching_current", opt(sw.switching_current)},
                                  {"retrapping_current", opt(sw.retrapping_current)},
                                  {"hysteresis_area", num(scq::rcsj::hysteresis_area(sw.up, sw.down))},
                                  {"points_per_direction", sw.up.points.size()}};
            std::cout << summary.dump(2) << "\n";
        };
    });

    // resonator
    auto* rs = app.add_subcommand("resonator", "Resonator transmission and loss analysis");
    rs->require_subcommand(1);
    std::string power_s;
    auto* rfit = rs->add_subcommand("fit", "Notch-type S21 fit");
    rfit->add_option("--power", power_s, "Power at the chip for the photon number (e.g. '-140 dBm')");
    rfit->callback([&] {
        action = [&] {
            require_in(g);
            const auto file = scq::io::ingest(g.in, scq::io::TraceKind::S21);
            const auto fit = scq::resonator::fit_s21(scq::io::to_s21_trace(file));
            auto power = q_opt(power_s, Dimension::Power, "--power");
            if (!power) power = file.quantity("power_at_chip", Dimension::Power);
            emit(g, {{"f0", num(fit.f0)},
                     {"q_total", num(fit.q_total)},
                     {"q_internal", num(fit.q_internal)},
                     {"q_external", num(fit.q_external_mag)},
                     {"phi", num(fit.phi)},
                     {"q_internal_uncertainty", num(fit.q_internal_uncertainty)},
                     {"photon_number", power ? num(scq::resonator::photon_number(fit, *power)) : json(nullptr)},
                     {"flagged", fit.flagged},
                     {"fit", fit_json(fit.result)}});
        };
    });

    std::string temp_s, freq_s;
    auto* qp = rs->add_subcommand("qi-power", "TLS saturation fit of Q_i versus photon number");
    qp->add_option("--temperature", temp_s, "Overrides the file header");
    qp->add_option("--frequency", freq_s, "Overrides the file header");
    qp->callback([&] {
        action = [&] {
            require_in(g);
            const auto file = scq::io::ingest(g.in, scq::io::TraceKind::QiPower);
            auto t = q_opt(temp_s, Dimension::Temperature, "--temperature");
            auto f = q_opt(freq_s, Dimension::Frequency, "--frequency");
            if (!t) t = file.quantity("temperature", Dimension::Temperature);
            if (!f) f = file.quantity("frequency", Dimension::Frequency);
            if (!t || !f) throw scq::ConfigError("temperature and frequency are needed (header or flags)");
            const auto fit = scq::resonator::fit_qi_vs_power(scq::io::to_qi_points(file), *t, *f);
            emit(g, {{"f_delta0", num(fit.tls.f_delta0)},
                     {"n_c", num(fit.tls.n_c)},
                     {"beta", num(fit.tls.beta)},
                     {"q_other", num(fit.q_other)},
                     {"model", fit.selected == scq::resonator::PowerModel::ConstantOnly ? "constant_only"
                                                                                        : "tls_plus_constant"},
                     {"rank_warning", fit.rank_warning},
                     {"fit", fit_json(fit.result)}});
        };
    });

    std::string tc_s, nph_s;
    auto* qt = rs->add_subcommand("qi-temp", "TLS plus conductor-loss fit of Q_i versus temperature");
    qt->add_option("--tc", tc_s, "Film Tc (else header 'tc')");
    qt->add_option("--frequency", freq_s, "Overrides the file header");
    qt->add_option("--photon-number", nph_s, "Overrides the file header");
    qt->callback([&] {
        action = [&] {
            require_in(g);
            const auto file = scq::io::ingest(g.in, scq::io::TraceKind::QiTemp);
            auto tc = q_opt(tc_s, Dimension::Temperature, "--tc");
            auto f = q_opt(freq_s, Dimension::Frequency, "--frequency");
            auto n = q_opt(nph_s, Dimension::Dimensionless, "--photon-number");
            if (!tc) tc = file.quantity("tc", Dimension::Temperature);
            if (!f) f = file.quantity("frequency", Dimension::Frequency);
            if (!n) n = file.quantity("photon_number", Dimension::Dimensionless);
            if (!tc || !f || !n) throw scq::ConfigError("tc, frequency and photon number are needed (header or flags)");
            const auto fit = scq::resonator::fit_qi_vs_temperature(scq::io::to_qi_points(file), *f, *tc, *n);
            emit(g, {{"q_other", num(fit.q_other)},
                     {"f_delta0", num(fit.f_delta0)},
                     {"alpha_kin", num(fit.alpha_kin)},
                     {"fit", fit_json(fit.result)}});
        };
    });

    // qubit
    auto* qb = app.add_subcommand("qubit", "Transmon parameters and coherence analysis");
    qb->require_subcommand(1);
    std::string ej_s, ec_s, csig_s, width_s, height_s, bias_s = "160 nm", icrn_s = "1.5 mV";
    bool exact = false;
    auto* params = qb->add_subcommand("params", "Transmon frequency and anharmonicity");
    params->add_option("--ej", ej_s, "E_J/h (e.g. '8.8 GHz')");
    params->add_option("--ec", ec_s, "E_C/h (e.g. '140 MHz')");
    params->add_option("--c-sigma", csig_s, "Total capacitance, used for E_C and with a junction design");
    params->add_option("--width", width_s, "Junction design width");
    params->add_option("--height", height_s, "Junction design height");
    params->add_option("--specific-resistance", rho_s, "Wafer specific resistance");
    params->add_option("--dimension-bias", bias_s, "Wafer dimension bias")->capture_default_str();
    params->add_option("--icrn", icrn_s, "Wafer IcRn product")->capture_default_str();
    params->add_flag("--exact", exact, "Diagonalize in the charge basis");
    params->callback([&] {
        action = [&] {
            const auto mode = exact ? scq::qubit::SpectrumMode::Exact : scq::qubit::SpectrumMode::Asymptotic;
            if (!width_s.empty()) {
                if (csig_s.empty() || height_s.empty() || rho_s.empty()) {
                    throw scq::ConfigError("a junction design needs --c-sigma, --width, --height and --specific-resistance");
                }
                const auto cal = scq::junction::WaferCalibration::make(
                    "cli", q(rho_s, Dimension::SpecificResistance, "--specific-resistance"),
                    q(bias_s, Dimension::Length, "--dimension-bias"), q(icrn_s, Dimension::Voltage, "--icrn"));
                const auto geom = cal.geometry(q(width_s, Dimension::Length, "--width"),
                                               q(height_s, Dimension::Length, "--height"));
                const auto tp = scq::qubit::transmon_from_design(q(csig_s, Dimension::Capacitance, "--c-sigma"), geom,
                                                                 cal, {0.05, mode});
                emit(g, {{"ej_over_h", num(tp.ej_over_h)},
                         {"ec_over_h", num(tp.ec_over_h)},
                         {"f01", num(tp.f01)},
                         {"anharmonicity", num(tp.anharmonicity)},
                         {"junction_capacitance", num(tp.junction_capacitance)},
                         {"participation_pj", num(tp.participation_pj)},
                         {"transmon_regime", tp.transmon_regime}});
                return;
            }
            if (ej_s.empty()) throw scq::ConfigError("--ej is required (or give a junction design)");
            double ec = 0.0;
            if (!ec_s.empty()) {
                ec = q(ec_s, Dimension::Frequency, "--ec");
            } else if (!csig_s.empty()) {
                ec = scq::qubit::charging_energy(q(csig_s, Dimension::Capacitance, "--c-sigma"));
            } else {
                throw scq::ConfigError("--ec or --c-sigma is required");
            }
            const auto s = scq::qubit::transmon_spectrum(q(ej_s, Dimension::Frequency, "--ej"), ec, mode);
            emit(g, {{"ec_over_h", num(ec)},
                     {"f01", num(s.f01)},
                     {"anharmonicity", num(s.anharmonicity)},
                     {"ej_over_ec", num(s.ej_over_ec)},
                     {"transmon_regime", s.transmon_regime}});
        };
    });

    std::string fq_s;
    for (const char* name : {"fit-t1", "fit-echo"}) {
        auto* c = qb->add_subcommand(name, std::string(name) == "fit-t1" ? "Energy relaxation fit" : "Hahn-echo decay fit");
        c->add_option("--f-q", fq_s, "Qubit frequency for the quality factor (else header 'f_q')");
        const bool t1 = std::string(name) == "fit-t1";
        c->callback([&, t1] {
            action = [&, t1] {
                require_in(g);
                const auto file = scq::io::ingest(g.in, scq::io::TraceKind::Decay);
                const auto trace = scq::io::to_decay_trace(file);
                emit(g, decay_json(t1 ? scq::qubit::fit_t1(trace) : scq::qubit::fit_echo(trace),
                                   qubit_frequency(fq_s, file)));
            };
        });
    }
    auto* ramsey = qb->add_subcommand("fit-ramsey", "Ramsey fringe fit");
    ramsey->add_option("--f-q", fq_s, "Qubit frequency for the quality factor (else header 'f_q')");
    ramsey->callback([&] {
        action = [&] {
            require_in(g);
            const auto file = scq::io::ingest(g.in, scq::io::TraceKind::Ramsey);
            const auto r = scq::qubit::fit_ramsey(scq::io::to_decay_trace(file));
            json j = {{"t2_star", num(r.t2_star)},
                      {"t2_star_uncertainty", num(r.t2_star_uncertainty)},
                      {"detuning", num(r.detuning)},
                      {"detuning_uncertainty", num(r.detuning_uncertainty)},
                      {"phase", num(r.phase)},
                      {"no_fringe", r.no_fringe},
                      {"fit", fit_json(r.result)}};
            if (const auto f = qubit_frequency(fq_s, file)) j["quality_factor"] = num(scq::qubit::quality_factor(*f, r.t2_star));
            emit(g, j);
        };
    });

    double level = 0.95;
    auto* budget = qb->add_subcommand("budget", "Junction-participation loss budget from a pipeline report");
    budget->add_option("--level", level, "Band confidence level")->capture_default_str();
    budget->callback([&] {
        action = [&] {
            require_in(g);
            const auto rep = scq::report::load(g.in);
            std::vector<scq::qubit::BudgetPoint> pts;
            for (const auto& row : rep.qubits) {
                if (row.transmon) pts.push_back({row.transmon->participation_pj, row.record.q1});
            }
            if (pts.empty()) throw scq::UnmetDependencyError("report has no qubits with design parameters");
            const auto fit = scq::qubit::loss_budget_fit(pts);
            json band = json::array();
            for (const auto& b : scq::qubit::budget_band(fit, scq::synthetic::linspace(0.0, 1.0, 21), level)) {
                band.push_back({{"p_j", num(b.p_j)}, {"q1", num(b.q1)}, {"lower", num(b.lower)}, {"upper", num(b.upper)}});
            }
            emit(g, {{"q_junction", num(fit.q_junction)},
                     {"q_other", num(fit.q_other)},
                     {"fit", fit_json(fit.result)},
                     {"band", band}});
        };
    });

    std::string q1z_s = "2.57e5", tcq_s = "1.2 K", fqq_s = "3 GHz", tmin_s = "10 mK", tmax_s = "2 K";
    double target = 2e5;
    int curve_points = 50;
    auto* qpc = qb->add_subcommand("qp-curve", "Q1 versus temperature with a thermal-bath and quasiparticle model");
    qpc->add_option("--q1-zero", q1z_s, "Q1 at zero temperature")->capture_default_str();
    qpc->add_option("--tc", tcq_s, "Electrode Tc setting the gap")->capture_default_str();
    qpc->add_option("--f-q", fqq_s, "Qubit frequency")->capture_default_str();
    qpc->add_option("--t-min", tmin_s, "Lowest temperature")->capture_default_str();
    qpc->add_option("--t-max", tmax_s, "Highest temperature")->capture_default_str();
    qpc->add_option("--points", curve_points, "Curve points")->capture_default_str();
    qpc->add_option("--target", target, "Q for the quasiparticle onset temperature")->capture_default_str();
    qpc->callback([&] {
        action = [&] {
            const double tc = q(tcq_s, Dimension::Temperature, "--tc");
            const scq::qubit::BathModel model{q(q1z_s, Dimension::Dimensionless, "--q1-zero"),
                                              q(fqq_s, Dimension::Frequency, "--f-q"), scq::delta0_from_tc(tc)};
            const auto temps = scq::synthetic::linspace(q(tmin_s, Dimension::Temperature, "--t-min"),
                                                        q(tmax_s, Dimension::Temperature, "--t-max"),
                                                        static_cast<std::size_t>(std::max(curve_points, 2)));
            json curve = json::array();
            for (const auto& p : scq::qubit::q_vs_temperature_model(temps, model)) {
                curve.push_back({{"temperature", num(p.temperature)},
                                 {"q_bath", num(p.q_bath)},
                                 {"q_qp", num(p.q_qp)},
                                 {"q_total", num(p.q_total)}});
            }
            emit(g, {{"delta_eV", num(model.delta)},
                     {"onset_temperature", num(scq::qubit::quasiparticle_onset(model.f_q, model.delta, target))},
                     {"curve", curve}});
        };
    });

    // pipeline
    int exit_status = 0;
    auto* pl = app.add_subcommand("pipeline", "Batch analysis");
    pl->require_subcommand(1);
    std::string created_at;
    auto* run = pl->add_subcommand("run", "Run the configured analyses and write a report");
    run->add_option("--created-at", created_at, "Fixed report timestamp (for reproducible output)");
    run->callback([&] {
        action = [&] {
            const std::string cfg_path = !g.config.empty() ? g.config : g.in;
            if (cfg_path.empty()) throw scq::ConfigError("--config is required");
            const auto cfg = scq::pipeline::load_config(cfg_path);
            scq::pipeline::RunOptions ro;
            ro.workers = g.workers > 1 ? g.workers : cfg.workers.value_or(g.workers);
            if (!created_at.empty()) ro.created_at = created_at;
            const auto rep = scq::pipeline::run_pipeline(cfg, ro);
            const std::string text = scq::report::serialize(rep);
            if (g.out.empty()) std::cout << text; else scq::io::write_file_atomic(g.out, text);
            for (const auto& e : rep.errors) std::cerr << "error [" << e.stage << "] " << e.source << ": " << e.message << "\n";
            exit_status = scq::pipeline::exit_code(rep);
        };
    });
    bool no_extras = false;
    auto* synth = pl->add_subcommand("synth", "Write a synthetic wafer bundle and its configuration");
    synth->add_flag("--no-extras", no_extras, "Only film, areas, IV, S21 and qubit decays");
    synth->callback([&] {
        action = [&] {
            if (g.out.empty()) throw scq::ConfigError("--out (bundle directory) is required");
            scq::synthetic::BundleOptions bo;
            bo.seed = g.seed;
            bo.include_extras = !no_extras;
            const auto truth = scq::synthetic::write_wafer_bundle(g.out, bo);
            std::cout << json{{"config", truth.config.string()},
                              {"specific_resistance", num(truth.specific_resistance)},
                              {"dimension_bias", num(truth.dimension_bias)},
                              {"icrn_product", num(truth.icrn_product)},
                              {"jc", num(truth.jc)}}
                             .dump(2)
                      << "\n";
        };
    });

    // plot
    auto* pt = app.add_subcommand("plot", "Plot-ready data series");
    pt->require_subcommand(1);
    std::string figure;
    auto* emit_cmd = pt->add_subcommand("emit", "Write the series of one figure from a report");
    emit_cmd->add_option("--figure", figure, "Figure id")->required()->check(CLI::IsMember(scq::plot::figure_ids()));
    emit_cmd->callback([&] {
        action = [&] {
            require_in(g);
            if (g.out.empty()) throw scq::ConfigError("--out (directory) is required");
            for (const auto& p : scq::plot::emit_plot_data(scq::report::load(g.in), figure, g.out)) {
                std::cout << p.string() << "\n";
            }
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    try {
        if (action) action();
    } catch (const scq::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_status;
}
