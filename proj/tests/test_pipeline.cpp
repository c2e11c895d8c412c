#include "bundle_check.hpp"
#include "oracles.hpp"

#include "scq/digest.hpp"
#include "scq/errors.hpp"
#include "scq/pipeline.hpp"
#include "scq/plot.hpp"
#include "scq/report.hpp"
#include "scq/synthetic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;
namespace pl = scq::pipeline;
namespace syn = scq::synthetic;

namespace {

const syn::BundleTruth& bundle() {
    static const syn::BundleTruth truth = syn::write_wafer_bundle(oracle::scratch_dir("pipeline_bundle"));
    return truth;
}

pl::RunOptions fixed_clock(std::size_t workers) { return {workers, "2026-01-01T00:00:00Z"}; }

} // namespace

TEST_CASE("a single R(T) trace yields one film row", "[pipeline]") {
    const auto dir = bundle().config.parent_path();
    const auto cfg = pl::parse_config(R"({"wafers": [{"wafer_id": "W01", "rt": "rt.csv"}]})", dir);
    const auto rep = pl::run_pipeline(cfg, fixed_clock(1));
    REQUIRE(rep.film.size() == 1);
    CHECK(rep.film[0].source == "rt.csv");
    CHECK(rep.film[0].digest == scq::io::sha256_hex(scq::io::read_file(dir / "rt.csv")));
    CHECK(rep.calibrations.empty());
    CHECK(rep.qubits.empty());
    CHECK(rep.status == "complete");
    CHECK(pl::exit_code(rep) == 0);
    CHECK(rep.provenance.size() == 1);
}

TEST_CASE("a missing file becomes one error row", "[pipeline][errors]") {
    const auto dir = bundle().config.parent_path();
    const auto cfg = pl::parse_config(R"({"wafers": [{"wafer_id": "W01", "rt": "rt.csv", "areas": "nope.csv"}]})", dir);
    const auto rep = pl::run_pipeline(cfg, fixed_clock(2));
    CHECK(rep.status == "partial");
    CHECK(pl::exit_code(rep) == 2);
    REQUIRE(rep.errors.size() == 1);
    CHECK(rep.errors[0].source == "nope.csv");
    // The film stage is unaffected by the failed calibration input.
    CHECK(rep.film.size() == 1);
}

TEST_CASE("configuration errors", "[pipeline][config]") {
    CHECK_THROWS_AS(pl::parse_config("{", "."), scq::ConfigError);
    CHECK_THROWS_AS(pl::parse_config(R"({"wafers": [{"rt": "rt.csv"}]})", "."), scq::ConfigError);
    CHECK_THROWS_AS(pl::parse_config(R"({"wafers": [], "colour": "blue"})", "."), scq::ConfigError);
    CHECK_THROWS_AS(
        pl::parse_config(R"({"wafers": [{"wafer_id": "W", "oxidation_exposure": "12 furlongs"}]})", "."),
        scq::ConfigError);
    const auto cfg = pl::parse_config(
        R"({"workers": 3, "wafers": [{"wafer_id": "W", "oxidation_exposure": "2000 Pa_s",
             "qubits": [{"id": "Q1", "t1": "t.csv", "f_q": "3.1 GHz",
                         "design": {"width": "1 um", "height": "0.9 um", "c_sigma": "138 fF"}}]}]})",
        "/data");
    CHECK(cfg.workers == 3u);
    CHECK(cfg.wafers.at(0).oxidation_exposure == Catch::Approx(2000.0));
    CHECK(cfg.wafers[0].qubits.at(0).f_q == Catch::Approx(3.1e9));
    CHECK(cfg.wafers[0].qubits[0].design->c_sigma == Catch::Approx(138e-15));
    CHECK(cfg.base_dir == fs::path("/data"));
}

TEST_CASE("full synthetic wafer bundle round trip", "[pipeline][bundle]") {
    const auto& truth = bundle();
    const auto rep = pl::run_pipeline(pl::load_config(truth.config), fixed_clock(4));
    const auto check = bundle_check::compare(rep, truth);
    for (const auto& f : check.failures()) FAIL_CHECK(f);
    CHECK(check.count() > 60);
    CHECK(pl::exit_code(rep) == 0);
    // Every result row names a digest that appears in the provenance list.
    for (const auto& r : rep.resonators) {
        bool listed = false;
        for (const auto& p : rep.provenance) listed |= p.digest == r.digest && p.source == r.source;
        CHECK(listed);
    }
}

TEST_CASE("worker count and repetition do not change the report", "[pipeline][determinism][property]") {
    const auto cfg = pl::load_config(bundle().config);
    const auto one = scq::report::serialize(pl::run_pipeline(cfg, fixed_clock(1)));
    const auto eight = scq::report::serialize(pl::run_pipeline(cfg, fixed_clock(8)));
    const auto again = scq::report::serialize(pl::run_pipeline(cfg, fixed_clock(8)));
    CHECK(one == eight);
    CHECK(eight == again);

    // Only created_at differs when the clock is not pinned.
    auto a = pl::run_pipeline(cfg, {2, std::nullopt});
    auto b = pl::run_pipeline(cfg, {3, std::nullopt});
    a.created_at = b.created_at = "";
    CHECK(scq::report::serialize(a) == scq::report::serialize(b));
}

TEST_CASE("the saved report reloads bit-identically", "[pipeline][report]") {
    const auto rep = pl::run_pipeline(pl::load_config(bundle().config), fixed_clock(4));
    const auto dir = oracle::scratch_dir("pipeline_report");
    scq::report::save(dir / "a.json", rep);
    const auto back = scq::report::load(dir / "a.json");
    CHECK(back == rep);
    scq::report::save(dir / "b.json", back);
    CHECK(scq::io::read_file(dir / "a.json") == scq::io::read_file(dir / "b.json"));
}

TEST_CASE("plot data emission", "[pipeline][plot]") {
    const auto rep = pl::run_pipeline(pl::load_config(bundle().config), fixed_clock(4));
    const auto out = oracle::scratch_dir("plots");

    SECTION("J_c versus exposure") {
        const auto fig = scq::plot::build_figure(rep, "jc_vs_exposure");
        std::vector<std::string> names;
        for (const auto& s : fig.series) names.push_back(s.name);
        CHECK(std::count(names.begin(), names.end(), "HDPCVD data") == 1);
        CHECK(std::count(names.begin(), names.end(), "PECVD data") == 1);
        CHECK(std::count(names.begin(), names.end(), "HDPCVD E^-1/2 guide") == 1);
        CHECK(std::count(names.begin(), names.end(), "PECVD E^-1/2 guide") == 1);
        CHECK(fig.x.log_scale);
        const auto files = scq::plot::emit_plot_data(rep, "jc_vs_exposure", out);
        CHECK(files.size() == fig.series.size() + 1);
        for (const auto& f : files) CHECK(fs::file_size(f) > 0);
    }
    SECTION("Q1 versus participation") {
        const auto fig = scq::plot::build_figure(rep, "q1_vs_pj");
        REQUIRE(fig.series.size() == 3);
        CHECK(fig.series[0].style == "points");
        CHECK(fig.series[0].data[0].size() == bundle().qubits.size());
        const auto& band = fig.series[2];
        CHECK(band.style == "band");
        const auto& model = fig.series[1].data[1];
        for (std::size_t i = 0; i < model.size(); ++i) {
            CHECK(band.data[1][i] <= model[i]);
            CHECK(model[i] <= band.data[2][i]);
        }
    }
    SECTION("every known figure builds from a full report") {
        for (const auto& id : scq::plot::figure_ids()) CHECK_NOTHROW(scq::plot::build_figure(rep, id));
    }
    SECTION("missing inputs") {
        const scq::report::AnalysisReport empty;
        for (const auto& id : scq::plot::figure_ids()) {
            CHECK_THROWS_AS(scq::plot::build_figure(empty, id), scq::UnmetDependencyError);
        }
        CHECK_THROWS_AS(scq::plot::build_figure(rep, "nonsense"), scq::ConfigError);
    }
}

TEST_CASE("parallel_for visits every index once", "[pipeline][concurrency]") {
    for (std::size_t workers : {1u, 3u, 16u}) {
        std::vector<std::atomic<int>> hits(101);
        pl::parallel_for(hits.size(), workers, [&](std::size_t i) { hits[i].fetch_add(1); });
        for (const auto& h : hits) CHECK(h.load() == 1);
    }
    pl::parallel_for(0, 4, [](std::size_t) { FAIL("called for an empty range"); });
}
