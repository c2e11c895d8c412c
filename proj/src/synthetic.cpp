#include "scq/synthetic.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"
#include "scq/qubit.hpp"
#include "scq/digest.hpp"
#include "scq/trace_file.hpp"

#include "json.hpp"

#include <cmath>
#include <cstdio>

namespace scq::synthetic {

namespace {

constexpr double kTwoPi = 2.0 * constants::pi;

std::string fmt(double v, const char* unit) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g %s", v, unit);
    return buf;
}

} // namespace

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    auto out = linspace(std::log10(a), std::log10(b), n);
    for (double& v : out) v = std::pow(10.0, v);
    return out;
}

std::vector<junction::AreaSample> area_samples(double specific_resistance, double dimension_bias,
                                               const std::vector<double>& sides, double noise, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<junction::AreaSample> out;
    for (double s : sides) {
        const double r = specific_resistance / ((s - dimension_bias) * (s - dimension_bias));
        out.push_back({s, s, r * (1.0 + noise * g(rng))});
    }
    return out;
}

ComplexTrace s21_trace(const S21Spec& spec, Rng& rng) {
    const double q = resonator::loaded_q(spec.q_internal, spec.q_external, spec.phi);
    const double half = spec.span_linewidths * spec.f0 / q;
    std::normal_distribution<double> g(0.0, 1.0);
    ComplexTrace out;
    out.label = "s21";
    out.x_unit = "Hz";
    out.x = linspace(spec.f0 - half, spec.f0 + half, spec.points);
    for (double f : out.x) {
        auto s = resonator::notch_s21(f, spec.f0, q, spec.q_external, spec.phi);
        if (spec.noise > 0.0) s += std::complex<double>(spec.noise * g(rng), spec.noise * g(rng));
        out.y.push_back(s);
    }
    return out;
}

Trace decay_trace(double tau, double amplitude, double offset, const std::vector<double>& delays, double noise,
                  Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Trace out;
    out.label = "decay";
    out.x_unit = "s";
    out.y_unit = "1";
    out.x = delays;
    for (double t : delays) {
        const double y = amplitude * std::exp(-t / tau) + offset;
        out.y.push_back(noise > 0.0 ? y + noise * g(rng) : y);
    }
    return out;
}

Trace ramsey_trace(double t2_star, double detuning, double phase, double amplitude, double offset,
                   const std::vector<double>& delays, double noise, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Trace out;
    out.label = "ramsey";
    out.x_unit = "s";
    out.y_unit = "1";
    out.x = delays;
    for (double t : delays) {
        const double y = amplitude * std::exp(-t / t2_star) * std::cos(kTwoPi * detuning * t + phase) + offset;
        out.y.push_back(noise > 0.0 ? y + noise * g(rng) : y);
    }
    return out;
}

std::vector<junction::AnnealPoint> anneal_points(double alpha, double tau, const std::vector<double>& times,
                                                 double noise, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<junction::AnnealPoint> out;
    for (double t : times) {
        const double r = junction::anneal_model(t, alpha, tau) * (1.0 + noise * g(rng));
        out.push_back({t, std::min(r, 1.0)});
    }
    return out;
}

std::vector<junction::ExposurePoint> exposure_points(double prefactor, double exponent,
                                                     const std::vector<double>& exposures, double noise, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<junction::ExposurePoint> out;
    for (double e : exposures) out.push_back({e, prefactor * std::pow(e, exponent) * (1.0 + noise * g(rng))});
    return out;
}

double rt_normal_resistance(const RtSpec& spec, double t) {
    // Residual plus a phonon-like term that is negligible near tc and
    // roughly linear at room temperature.
    const auto shape = [](double x) { return x * x * x / (x * x + 60.0 * 60.0); };
    return spec.residual_resistance +
           (spec.room_resistance - spec.residual_resistance) * shape(t) / shape(300.0);
}

std::vector<film::RtPoint> rt_points(const RtSpec& spec) {
    std::vector<double> temps;
    for (int i = 0; i <= 500; ++i) temps.push_back(2.0 + 0.02 * i);
    for (int i = 1; i <= 115; ++i) temps.push_back(12.0 + 2.5 * i);
    std::vector<film::RtPoint> out;
    for (double t : temps) {
        const double r = rt_normal_resistance(spec, t) / (1.0 + std::exp(-(t - spec.tc) / spec.width));
        out.push_back({t, r});
    }
    return out;
}

std::vector<resonator::QiPoint> qi_power_points(const resonator::TlsParams& tls, double q_other, double t, double f,
                                                const std::vector<double>& photon_numbers, double noise, Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<resonator::QiPoint> out;
    for (double n : photon_numbers) {
        const double loss = 1.0 / q_other + resonator::tls_loss(n, t, f, tls);
        out.push_back({n, (1.0 / loss) * (1.0 + noise * g(rng))});
    }
    return out;
}

std::vector<resonator::QiPoint> qi_temperature_points(double f, double tc, double n_ph, double q_other,
                                                      double f_delta0, double alpha,
                                                      const std::vector<double>& temperatures, double noise,
                                                      Rng& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<resonator::QiPoint> out;
    for (double t : temperatures) {
        const double q = resonator::qi_temperature_model(t, f, tc, n_ph, q_other, f_delta0, alpha);
        out.push_back({t, q * (1.0 + noise * g(rng))});
    }
    return out;
}

BundleTruth write_wafer_bundle(const std::filesystem::path& dir, const BundleOptions& options) {
    using io::TraceKind;
    std::filesystem::create_directories(dir);
    Rng rng(options.seed);
    BundleTruth truth;
    truth.wafer_id = options.wafer_id;
    const std::vector<std::pair<std::string, std::string>> wafer_header = {{"wafer_id", options.wafer_id}};
    nlohmann::json wafer = {{"wafer_id", options.wafer_id}};

    // Film.
    RtSpec rt;
    truth.tc = rt.tc;
    truth.rrr = rt_normal_resistance(rt, 300.0) / rt_normal_resistance(rt, rt.tc + 0.5);
    {
        const auto pts = rt_points(rt);
        std::vector<double> t, r;
        for (const auto& p : pts) {
            t.push_back(p.temperature);
            r.push_back(p.resistance);
        }
        auto header = wafer_header;
        header.emplace_back("length", "1 mm");
        header.emplace_back("width", "10 um");
        header.emplace_back("thickness", "100 nm");
        io::write_trace(dir / "rt.csv", io::make_trace(TraceKind::Rt, {{"temperature", t}, {"resistance", r}}, header));
        wafer["rt"] = "rt.csv";
    }

    // Junction calibration: area series and an IV curve of a large test junction.
    truth.specific_resistance = 6.0e-8;
    truth.dimension_bias = 160e-9;
    truth.ic = 38e-6;
    truth.rn = 39.0;
    truth.icrn_product = truth.ic * truth.rn;
    truth.jc = truth.icrn_product / truth.specific_resistance;
    {
        const auto sides = linspace(0.8e-6, 3.0e-6, 10);
        const auto samples = area_samples(truth.specific_resistance, truth.dimension_bias, sides, 0.01, rng);
        std::vector<double> w, h, r;
        for (const auto& s : samples) {
            w.push_back(s.design_width);
            h.push_back(s.design_height);
            r.push_back(s.resistance);
        }
        io::write_trace(dir / "areas.csv",
                        io::make_trace(TraceKind::Areas, {{"width", w}, {"height", h}, {"resistance", r}}, wafer_header));
        wafer["areas"] = "areas.csv";
        wafer["oxidation_exposure"] = "120 Pa_s";
        wafer["spacer_process"] = "HDPCVD";
    }
    {
        const auto jj = rcsj::with_beta_c(truth.ic, truth.rn, 4.0);
        const auto iv = rcsj::simulate_rcsj_iv(jj, {2.5 * truth.ic, 120, true});
        std::vector<double> i, v, s;
        for (const auto& p : iv.up.points) {
            i.push_back(p.current);
            v.push_back(p.voltage);
            s.push_back(0.0);
        }
        for (const auto& p : iv.down.points) {
            i.push_back(p.current);
            v.push_back(p.voltage);
            s.push_back(1.0);
        }
        io::write_trace(dir / "iv.csv",
                        io::make_trace(TraceKind::Iv, {{"current", i}, {"voltage", v}, {"sweep", s}}, wafer_header));
        wafer["iv"] = "iv.csv";
    }

    // Resonators.
    {
        const std::vector<S21Spec> specs = {
            {6.0e9, 2.0e5, 2.6e5, 0.1, 801, 8.0, 0.002},
            {7.1e9, 5.0e5, 1.0e5, -0.05, 801, 8.0, 0.002},
        };
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t k = 0; k < specs.size(); ++k) {
            const auto tr = s21_trace(specs[k], rng);
            std::vector<double> re, im;
            for (const auto& z : tr.y) {
                re.push_back(z.real());
                im.push_back(z.imag());
            }
            const std::string name = "s21_" + std::to_string(k) + ".csv";
            auto header = wafer_header;
            header.emplace_back("temperature", "20 mK");
            io::write_trace(dir / name,
                            io::make_trace(TraceKind::S21, {{"frequency", tr.x}, {"re_s21", re}, {"im_s21", im}}, header));
            truth.resonators.push_back({name, specs[k].f0, specs[k].q_internal, specs[k].q_external, specs[k].phi});
            list.push_back({{"s21", name}, {"power_at_chip", "-140 dBm"}});
        }
        wafer["resonators"] = list;
    }

    // Qubits: loss budget with a junction-borne and an "everything else" part.
    truth.q_junction = 1.0e5;
    truth.q_other = 1.0e6;
    {
        const auto cal = junction::WaferCalibration::make(options.wafer_id, truth.specific_resistance,
                                                          truth.dimension_bias, truth.icrn_product);
        const std::vector<double> sides = {0.8e-6, 1.0e-6, 1.2e-6, 1.5e-6};
        const double c_sigma = 138e-15;
        nlohmann::json list = nlohmann::json::array();
        for (std::size_t k = 0; k < sides.size(); ++k) {
            const auto tp = qubit::transmon_from_design(c_sigma, cal.geometry(sides[k], sides[k]), cal);
            BundleTruth::Qubit q;
            q.id = "Q" + std::to_string(k + 1);
            q.design_side = sides[k];
            q.c_sigma = c_sigma;
            q.f_q = tp.f01;
            q.p_j = tp.participation_pj;
            q.q1 = qubit::budget_model(q.p_j, truth.q_junction, truth.q_other);
            q.t1 = q.q1 / (kTwoPi * q.f_q);
            q.t2_star = 0.45 * q.t1;
            q.t2_echo = 0.8 * q.t1;

            auto header = wafer_header;
            header.emplace_back("f_q", fmt(q.f_q, "Hz"));
            header.emplace_back("temperature", "20 mK");
            const auto write_decay = [&](const std::string& name, TraceKind kind, const Trace& tr) {
                io::write_trace(dir / name, io::make_trace(kind, {{"delay", tr.x}, {"population", tr.y}}, header));
            };
            const std::string base = "q" + std::to_string(k + 1);
            write_decay(base + "_t1.csv", TraceKind::Decay,
                        decay_trace(q.t1, 0.9, 0.05, linspace(0.0, 5.0 * q.t1, 121), 0.003, rng));
            write_decay(base + "_ramsey.csv", TraceKind::Ramsey,
                        ramsey_trace(q.t2_star, 0.5e6, 0.0, 0.45, 0.5, linspace(0.0, 4.0 * q.t2_star, 201), 0.003,
                                     rng));
            write_decay(base + "_echo.csv", TraceKind::Decay,
                        decay_trace(q.t2_echo, 0.45, 0.5, linspace(0.0, 5.0 * q.t2_echo, 121), 0.003, rng));
            list.push_back({{"id", q.id},
                            {"t1", base + "_t1.csv"},
                            {"ramsey", base + "_ramsey.csv"},
                            {"echo", base + "_echo.csv"},
                            {"design", {{"width", fmt(sides[k] * 1e6, "um")},
                                        {"height", fmt(sides[k] * 1e6, "um")},
                                        {"c_sigma", fmt(c_sigma * 1e15, "fF")}}}});
            truth.qubits.push_back(q);
        }
        wafer["qubits"] = list;
    }

    if (options.include_extras) {
        truth.anneal_alpha = 0.023;
        truth.anneal_tau = 240.0;
        std::vector<double> times;
        for (int k = 1; k <= 10; ++k) times.push_back(180.0 * k);
        const auto ap = anneal_points(truth.anneal_alpha, truth.anneal_tau, times, 0.02, rng);
        std::vector<double> t, r;
        for (const auto& p : ap) {
            t.push_back(p.time);
            r.push_back(p.jc_ratio);
        }
        io::write_trace(dir / "anneal.csv", io::make_trace(TraceKind::Anneal, {{"time", t}, {"jc_ratio", r}}, wafer_header));
        wafer["anneal"] = {"anneal.csv"};

        nlohmann::json exposures = nlohmann::json::array();
        for (const auto& [process, k] : {std::pair{"HDPCVD", 1.0e8}, std::pair{"PECVD", 2.0e6}}) {
            const auto pts = exposure_points(k, -0.5, logspace(10.0, 1e4, 8), 0.03, rng);
            std::vector<double> e, j;
            for (const auto& p : pts) {
                e.push_back(p.exposure);
                j.push_back(p.jc);
            }
            auto header = wafer_header;
            header.emplace_back("spacer_process", process);
            const std::string name = std::string("exposure_") + process + ".csv";
            io::write_trace(dir / name, io::make_trace(TraceKind::Exposure, {{"exposure", e}, {"jc", j}}, header));
            exposures.push_back(name);
        }
        wafer["exposure"] = exposures;

        {
            const resonator::TlsParams tls{1.0e-5, 10.0, 0.5};
            const auto pts = qi_power_points(tls, 1.0e6, 0.02, 6.0e9, logspace(0.1, 1e6, 15), 0.01, rng);
            std::vector<double> n, q;
            for (const auto& p : pts) {
                n.push_back(p.x);
                q.push_back(p.q_i);
            }
            auto header = wafer_header;
            header.emplace_back("temperature", "20 mK");
            header.emplace_back("frequency", "6 GHz");
            io::write_trace(dir / "qi_power.csv",
                            io::make_trace(TraceKind::QiPower, {{"photon_number", n}, {"q_internal", q}}, header));
            wafer["qi_power"] = {"qi_power.csv"};
        }
        {
            const auto pts = qi_temperature_points(6.0e9, rt.tc, 1.0, 5.0e5, 1.0e-5, 0.1, linspace(0.05, 4.5, 25),
                                                   0.01, rng);
            std::vector<double> t, q;
            for (const auto& p : pts) {
                t.push_back(p.x);
                q.push_back(p.q_i);
            }
            auto header = wafer_header;
            header.emplace_back("frequency", "6 GHz");
            header.emplace_back("photon_number", "1");
            header.emplace_back("tc", fmt(rt.tc, "K"));
            io::write_trace(dir / "qi_temp.csv",
                            io::make_trace(TraceKind::QiTemp, {{"temperature", t}, {"q_internal", q}}, header));
            wafer["qi_temp"] = {"qi_temp.csv"};
        }
    }

    const nlohmann::json config = {{"wafers", nlohmann::json::array({wafer})}};
    truth.config = dir / "pipeline.json";
    io::write_file_atomic(truth.config, config.dump(2) + "\n");
    return truth;
}

} // namespace scq::synthetic
