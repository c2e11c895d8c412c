#pragma once

#include "scq/report.hpp"

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scq::pipeline {

struct ResonatorInput {
    std::string s21;
    std::optional<double> power_at_chip; ///< W
};

struct QubitDesign {
    double width = 0.0;   ///< m, design dimension
    double height = 0.0;  ///< m
    double c_sigma = 0.0; ///< F
};

struct QubitInput {
    std::string id;
    std::string t1;
    std::optional<std::string> ramsey;
    std::optional<std::string> echo;
    std::optional<double> f_q; ///< Hz; falls back to the T1 file header
    std::optional<QubitDesign> design;
};

struct WaferInput {
    std::string wafer_id;
    std::optional<std::string> rt;
    std::optional<std::string> areas;
    std::optional<std::string> iv;
    double oxidation_exposure = 0.0; ///< Pa s
    std::string spacer_process = "HDPCVD";
    std::vector<ResonatorInput> resonators;
    std::vector<QubitInput> qubits;
    std::vector<std::string> qi_power;
    std::vector<std::string> qi_temp;
    std::vector<std::string> anneal;
    std::vector<std::string> exposure;
};

/// Input file list and requested analyses. File names are resolved against
/// `base_dir` but reported exactly as written.
///
/// JSON layout:
///   { "created_at": "...", "workers": 4,
///     "wafers": [ { "wafer_id": "W01", "rt": "rt.csv", "areas": "areas.csv",
///                   "iv": "iv.csv", "oxidation_exposure": "120 Pa_s",
///                   "spacer_process": "HDPCVD",
///                   "resonators": [ {"s21": "a.csv", "power_at_chip": "-140 dBm"} ],
///                   "qubits": [ {"id": "Q1", "t1": "t1.csv", "ramsey": "r.csv",
///                                "echo": "e.csv", "f_q": "3 GHz",
///                                "design": {"width": "1 um", "height": "1 um",
///                                           "c_sigma": "138 fF"}} ],
///                   "qi_power": [...], "qi_temp": [...], "anneal": [...],
///                   "exposure": [...] } ] }
/// Quantities are SI numbers or strings with a unit.
struct PipelineConfig {
    std::filesystem::path base_dir;
    std::optional<std::string> created_at;
    std::optional<std::size_t> workers;
    std::vector<WaferInput> wafers;
};

/// Throws ConfigError on malformed input.
[[nodiscard]] PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);
[[nodiscard]] PipelineConfig load_config(const std::filesystem::path& path);

struct RunOptions {
    std::size_t workers = 1;
    /// Overrides the timestamp (config value first, then the clock).
    std::optional<std::string> created_at;
};

/// Runs film, calibration, prediction and fit stages in dependency order;
/// fits within a stage run on a bounded worker pool. Failures become error
/// rows and mark the report partial.
[[nodiscard]] report::AnalysisReport run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

/// 0 for a complete report, 2 for a partial one.
[[nodiscard]] int exit_code(const report::AnalysisReport& report);

/// Runs `task(i)` for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& task);

} // namespace scq::pipeline
