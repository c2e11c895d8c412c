#include "scq/plot.hpp"

#include "scq/constants.hpp"
#include "scq/digest.hpp"
#include "scq/errors.hpp"
#include "scq/physics.hpp"
#include "scq/qubit.hpp"
#include "scq/synthetic.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace scq::plot {

namespace {

using report::AnalysisReport;

constexpr std::size_t kCurvePoints = 100;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Series points(std::string name, std::vector<std::string> cols, std::vector<std::vector<double>> data) {
    return {std::move(name), "points", std::move(cols), std::move(data)};
}

Series line(std::string name, std::vector<std::string> cols, std::vector<std::vector<double>> data) {
    return {std::move(name), "line", std::move(cols), std::move(data)};
}

Figure jc_vs_exposure(const AnalysisReport& rep) {
    std::map<std::string, std::vector<junction::ExposurePoint>> groups;
    for (const auto& row : rep.exposures) {
        auto& g = groups[std::string(junction::to_string(row.spacer_process))];
        for (const auto& p : row.points) g.push_back({p.x, p.y});
    }
    for (const auto& c : rep.calibrations) {
        if (c.calibration.oxidation_exposure > 0.0) {
            groups[std::string(junction::to_string(c.calibration.spacer_process))].push_back(
                {c.calibration.oxidation_exposure, c.calibration.jc});
        }
    }
    if (groups.empty()) {
        throw UnmetDependencyError("jc_vs_exposure needs exposure sweeps or calibrations with an oxidation exposure");
    }
    Figure fig{"jc_vs_exposure", "Critical current density versus oxygen exposure",
               {"oxygen exposure", "Pa s", true}, {"J_c", "A/m^2", true}, {}};
    for (const auto& [process, pts] : groups) {
        std::vector<double> e, j;
        for (const auto& p : pts) {
            e.push_back(p.exposure);
            j.push_back(p.jc);
        }
        const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
        fig.series.push_back(points(process + " data", {"exposure", "jc"}, {e, j}));
        // Guide line with the exponent held at -1/2 through this group's data.
        const auto fit = junction::fit_exposure_law(pts, -0.5);
        const auto grid = synthetic::logspace(*lo / 2.0, *hi * 2.0, kCurvePoints);
        std::vector<double> model;
        for (double x : grid) model.push_back(fit.prefactor * std::pow(x, -0.5));
        fig.series.push_back(line(process + " E^-1/2 guide", {"exposure", "jc"}, {grid, model}));
    }
    return fig;
}

Figure q1_vs_pj(const AnalysisReport& rep) {
    std::vector<qubit::BudgetPoint> pts;
    for (const auto& q : rep.qubits) {
        if (q.transmon) pts.push_back({q.transmon->participation_pj, q.record.q1});
    }
    if (pts.empty()) throw UnmetDependencyError("q1_vs_pj needs qubit results with transmon design parameters");
    Figure fig{"q1_vs_pj", "Qubit quality factor versus junction participation",
               {"junction participation p_j", "1", false}, {"Q1", "1", true}, {}};
    std::vector<double> x, y;
    for (const auto& p : pts) {
        x.push_back(p.p_j);
        y.push_back(p.q1);
    }
    fig.series.push_back(points("qubits", {"p_j", "q1"}, {x, y}));
    const auto fit = qubit::loss_budget_fit(pts);
    const double top = std::min(1.0, 1.2 * *std::max_element(x.begin(), x.end()));
    const auto grid = synthetic::linspace(0.0, top, kCurvePoints);
    const auto band = qubit::budget_band(fit, grid);
    std::vector<double> m, lo, hi;
    for (const auto& b : band) {
        m.push_back(b.q1);
        lo.push_back(b.lower);
        hi.push_back(b.upper);
    }
    fig.series.push_back(line("loss budget model", {"p_j", "q1"}, {grid, m}));
    fig.series.push_back({"95% parameter band", "band", {"p_j", "lower", "upper"}, {grid, lo, hi}});
    return fig;
}

Figure q1_vs_frequency(const AnalysisReport& rep) {
    if (rep.qubits.empty()) throw UnmetDependencyError("q1_vs_frequency needs qubit results");
    Figure fig{"q1_vs_frequency", "Qubit quality factors versus frequency", {"qubit frequency", "Hz", false},
               {"quality factor", "1", true}, {}};
    std::vector<double> f, q1, q2s, q2e;
    for (const auto& q : rep.qubits) {
        f.push_back(q.record.f_q);
        q1.push_back(q.record.q1);
        q2s.push_back(q.record.q2_star);
        q2e.push_back(q.record.q2_echo);
    }
    fig.series.push_back(points("Q1", {"f_q", "q"}, {f, q1}));
    fig.series.push_back(points("Q2*", {"f_q", "q"}, {f, q2s}));
    fig.series.push_back(points("Q2 echo", {"f_q", "q"}, {f, q2e}));
    std::vector<qubit::CoherenceRecord> records;
    for (const auto& q : rep.qubits) records.push_back(q.record);
    const auto means = qubit::population_means(records);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    fig.series.push_back(line("mean Q1", {"f_q", "q"}, {{*lo, *hi}, {means.q1, means.q1}}));
    return fig;
}

Figure qi_vs_temperature(const AnalysisReport& rep) {
    if (rep.qi_temperature.empty()) throw UnmetDependencyError("qi_vs_temperature needs Q_i temperature sweeps");
    Figure fig{"qi_vs_temperature", "Internal quality factor versus temperature", {"temperature", "K", false},
               {"Q", "1", true}, {}};
    for (const auto& row : rep.qi_temperature) {
        std::vector<double> t, q;
        for (const auto& p : row.points) {
            t.push_back(p.x);
            q.push_back(p.y);
        }
        const std::string tag = row.wafer_id + " " + row.source;
        fig.series.push_back(points(tag + " data", {"temperature", "q_internal"}, {t, q}));
        const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
        const auto grid = synthetic::linspace(*lo, *hi, kCurvePoints);
        resonator::QiTemperatureOptions opts;
        opts.n_c = row.n_c;
        opts.beta = row.beta;
        std::vector<double> model, qp_nb, qp_al;
        for (double x : grid) {
            model.push_back(resonator::qi_temperature_model(x, row.frequency, row.tc, row.photon_number, row.q_other,
                                                           row.f_delta0, row.alpha_kin, opts));
            qp_nb.push_back(qubit::quasiparticle_q(row.frequency, x, delta0_from_tc(row.tc)));
            qp_al.push_back(qubit::quasiparticle_q(row.frequency, x, delta0_from_tc(1.2)));
        }
        fig.series.push_back(line(tag + " model", {"temperature", "q_internal"}, {grid, model}));
        fig.series.push_back(line(tag + " quasiparticle limit (film gap)", {"temperature", "q"}, {grid, qp_nb}));
        fig.series.push_back(line(tag + " quasiparticle limit (Al gap)", {"temperature", "q"}, {grid, qp_al}));
    }
    return fig;
}

Figure qi_vs_power(const AnalysisReport& rep) {
    if (rep.qi_power.empty()) throw UnmetDependencyError("qi_vs_power needs Q_i power sweeps");
    Figure fig{"qi_vs_power", "Internal quality factor versus photon number", {"photon number", "1", true},
               {"Q_i", "1", true}, {}};
    for (const auto& row : rep.qi_power) {
        std::vector<double> n, q;
        for (const auto& p : row.points) {
            n.push_back(p.x);
            q.push_back(p.y);
        }
        const std::string tag = row.wafer_id + " " + row.source;
        fig.series.push_back(points(tag + " data", {"photon_number", "q_internal"}, {n, q}));
        const auto [lo, hi] = std::minmax_element(n.begin(), n.end());
        const auto grid = synthetic::logspace(*lo, *hi, kCurvePoints);
        const resonator::TlsParams tls{row.f_delta0, row.n_c, row.beta};
        std::vector<double> model;
        for (double x : grid) {
            const double tls_part = row.model == "constant_only" ? 0.0 : resonator::tls_loss(x, row.temperature, row.frequency, tls);
            model.push_back(1.0 / (1.0 / row.q_other + tls_part));
        }
        fig.series.push_back(line(tag + " model", {"photon_number", "q_internal"}, {grid, model}));
    }
    return fig;
}

std::string slug(std::string s) {
    for (char& c : s) {
        const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
        if (!keep) c = '_';
    }
    return s;
}

} // namespace

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {"jc_vs_exposure", "q1_vs_pj", "q1_vs_frequency", "qi_vs_temperature",
                                                 "qi_vs_power"};
    return ids;
}

Figure build_figure(const AnalysisReport& report, std::string_view figure_id) {
    if (figure_id == "jc_vs_exposure") return jc_vs_exposure(report);
    if (figure_id == "q1_vs_pj") return q1_vs_pj(report);
    if (figure_id == "q1_vs_frequency") return q1_vs_frequency(report);
    if (figure_id == "qi_vs_temperature") return qi_vs_temperature(report);
    if (figure_id == "qi_vs_power") return qi_vs_power(report);
    throw ConfigError("unknown figure id '" + std::string(figure_id) + "'");
}

std::vector<std::filesystem::path> write_figure(const Figure& figure, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    nlohmann::json index = {
        {"figure", figure.id},
        {"title", figure.title},
        {"x_axis", {{"label", figure.x.label}, {"unit", figure.x.unit}, {"log", figure.x.log_scale}}},
        {"y_axis", {{"label", figure.y.label}, {"unit", figure.y.unit}, {"log", figure.y.log_scale}}},
        {"series", nlohmann::json::array()},
    };
    for (std::size_t k = 0; k < figure.series.size(); ++k) {
        const auto& s = figure.series[k];
        const std::string file = figure.id + "_" + std::to_string(k) + "_" + slug(s.name) + ".csv";
        std::string text = "# figure: " + figure.id + "\n# series: " + s.name + "\n# style: " + s.style + "\n";
        for (std::size_t c = 0; c < s.columns.size(); ++c) text += (c ? "," : "") + s.columns[c];
        text += "\n";
        const std::size_t rows = s.data.empty() ? 0 : s.data.front().size();
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < s.data.size(); ++c) text += (c ? "," : "") + format_double(s.data[c][r]);
            text += "\n";
        }
        io::write_file_atomic(out_dir / file, text);
        written.push_back(out_dir / file);
        index["series"].push_back({{"name", s.name}, {"style", s.style}, {"file", file}, {"columns", s.columns}});
    }
    const auto index_path = out_dir / (figure.id + ".json");
    io::write_file_atomic(index_path, index.dump(2) + "\n");
    written.insert(written.begin(), index_path);
    return written;
}

std::vector<std::filesystem::path> emit_plot_data(const report::AnalysisReport& report, std::string_view figure_id,
                                                  const std::filesystem::path& out_dir) {
    return write_figure(build_figure(report, figure_id), out_dir);
}

} // namespace scq::plot
