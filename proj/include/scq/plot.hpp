#pragma once

#include "scq/report.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scq::plot {

struct Axis {
    std::string label;
    std::string unit;
    bool log_scale = false;
};

/// One plottable series: named columns of equal length.
struct Series {
    std::string name;
    std::string style; ///< "points", "line" or "band"
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;
};

struct Figure {
    std::string id;
    std::string title;
    Axis x;
    Axis y;
    std::vector<Series> series;
};

/// Known figure ids: jc_vs_exposure, q1_vs_pj, q1_vs_frequency,
/// qi_vs_temperature, qi_vs_power.
[[nodiscard]] const std::vector<std::string>& figure_ids();

/// Builds the figure from report content. Throws UnmetDependencyError when
/// the report lacks the needed result kinds and ConfigError for an unknown id.
[[nodiscard]] Figure build_figure(const report::AnalysisReport& report, std::string_view figure_id);

/// Writes `<id>.json` (axes and series index) and one CSV per series into
/// `out_dir`; returns the written paths.
std::vector<std::filesystem::path> write_figure(const Figure& figure, const std::filesystem::path& out_dir);

/// build_figure followed by write_figure.
std::vector<std::filesystem::path> emit_plot_data(const report::AnalysisReport& report, std::string_view figure_id,
                                                  const std::filesystem::path& out_dir);

} // namespace scq::plot
