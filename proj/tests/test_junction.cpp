#include "oracles.hpp"

#include "scq/errors.hpp"
#include "scq/junction.hpp"
#include "scq/synthetic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace jj = scq::junction;
namespace syn = scq::synthetic;

namespace {
const double nb_delta = 1.76 * oracle::kB_eV * 9.2;
const std::vector<double> sides = syn::linspace(0.8e-6, 3e-6, 10);
} // namespace

TEST_CASE("Ambegaokar-Baratoff product", "[junction][ab]") {
    const double expected = oracle::pi * nb_delta / 2.0; // Delta in eV -> volts after /e
    CHECK_THAT(jj::ab_icrn(nb_delta, 0.0), WithinRel(expected, 1e-12));
    CHECK_THAT(jj::ab_icrn(nb_delta, 0.0), WithinRel(2.19e-3, 3e-3));

    const double t = 4.6;
    const double tanh_factor = std::tanh(nb_delta / (2.0 * oracle::kB_eV * t));
    CHECK_THAT(jj::ab_icrn(nb_delta, t), WithinRel(expected * tanh_factor, 1e-12));

    CHECK(jj::ab_icrn(nb_delta, 1e6) < 1e-3 * expected);
    CHECK_THAT(jj::icrn_suppression(1.5e-3, nb_delta, 0.0), WithinAbs(0.685, 0.005));
}

TEST_CASE("critical current from the normal resistance", "[junction]") {
    CHECK(jj::ic_from_rn(39.0, 1.482e-3) == 1.482e-3 / 39.0);
    CHECK_THAT(jj::ic_from_rn(39.0, 1.482e-3), WithinRel(38e-6, 1e-12));
    CHECK_THAT(jj::ic_from_rn(78.0, 1.482e-3), WithinRel(19e-6, 1e-12));
    CHECK_THAT(jj::ic_from_rn(148.2, 1.482e-3), WithinRel(10e-6, 1e-12));
    CHECK_THROWS_AS(jj::ic_from_rn(0.0, 1.482e-3), scq::DomainError);
}

TEST_CASE("Josephson inductance", "[junction]") {
    CHECK_THAT(jj::josephson_inductance(38e-6), WithinRel(oracle::phi0 / (2 * oracle::pi * 38e-6), 1e-12));
    CHECK_THAT(jj::josephson_inductance(38e-6), WithinRel(8.66e-12, 1e-3));
    CHECK_THAT(jj::josephson_inductance(19e-6), WithinRel(2.0 * jj::josephson_inductance(38e-6), 1e-12));
    CHECK_THAT(jj::josephson_inductance(1e-6), WithinRel(329e-12, 1e-3));
}

TEST_CASE("critical current density from calibration", "[junction]") {
    CHECK_THAT(jj::jc_from_calibration(1.5e-12, 1.5e-3), WithinRel(1.0e9, 1e-12));
    // 1e9 A/m^2 is 100 kA/cm^2.
    CHECK_THAT(jj::jc_from_calibration(1.5e-12, 1.5e-3) * 1e-4 / 1e3, WithinRel(100.0, 1e-12));
    CHECK_THAT(jj::jc_from_calibration(1.5e-11, 1.5e-3), WithinRel(1.0e8, 1e-12));

    const auto cal = jj::WaferCalibration::make("W", 1.5e-12, 160e-9, 1.5e-3);
    CHECK_NOTHROW(cal.validate());
    auto broken = cal;
    broken.jc *= 1.01;
    CHECK_THROWS(broken.validate());
}

TEST_CASE("effective geometry and prediction chain", "[junction][geometry]") {
    const jj::JunctionGeometry g{1e-6, 1e-6, 160e-9};
    CHECK_THAT(g.effective_area(), WithinRel(0.7056e-12, 1e-12));
    const jj::JunctionGeometry unbiased{1.3e-6, 0.9e-6, 0.0};
    CHECK_THAT(unbiased.effective_area(), WithinRel(1.3e-6 * 0.9e-6, 1e-15));

    const auto cal = jj::WaferCalibration::make("W", 1.5e-12, 160e-9, 1.5e-3);
    for (double side : {0.5e-6, 1e-6, 2.2e-6}) {
        const auto p = jj::predict_junction(cal.geometry(side, side), cal);
        CHECK_THAT(p.ic, WithinRel(cal.jc * p.effective_area, 1e-12));
        CHECK_THAT(p.rn * p.ic, WithinRel(cal.icrn_product, 1e-12));
        CHECK_THAT(p.l_j, WithinRel(jj::josephson_inductance(p.ic), 1e-12));
        CHECK_THAT(p.ej_over_h, WithinRel(oracle::phi0 * p.ic / (2 * oracle::pi) / oracle::h_Js, 1e-12));
    }

    const jj::JunctionGeometry collapsed{1e-6, 0.1e-6, 160e-9};
    REQUIRE_THROWS_AS(collapsed.effective_area(), scq::GeometryError);
    REQUIRE_THROWS_WITH(collapsed.effective_area(), ContainsSubstring("height"));
    CHECK_THROWS_AS(jj::predict_junction(collapsed, cal), scq::GeometryError);
}

TEST_CASE("area scaling fit", "[junction][area]") {
    syn::Rng rng(0);
    SECTION("noiseless recovery") {
        const auto fit = jj::fit_area_scaling(syn::area_samples(1.5e-12, 160e-9, sides, 0.0, rng));
        CHECK_THAT(fit.specific_resistance, WithinRel(1.5e-12, 1e-3));
        CHECK_THAT(fit.dimension_bias, WithinRel(160e-9, 1e-3));
        CHECK(fit.resistance_spread < 1e-6);
    }
    SECTION("unbiased data") {
        const auto fit = jj::fit_area_scaling(syn::area_samples(1.5e-12, 0.0, sides, 0.02, rng));
        CHECK(std::abs(fit.dimension_bias) <= 3.0 * fit.result.uncertainty("dimension_bias") + 1e-12);
    }
    SECTION("etched versus unetched sets") {
        const auto unetched = jj::fit_area_scaling(syn::area_samples(1.5e-12, 20e-9, sides, 0.0, rng));
        const auto etched = jj::fit_area_scaling(syn::area_samples(1.5e-12, 180e-9, sides, 0.0, rng));
        CHECK_THAT(etched.dimension_bias - unetched.dimension_bias, WithinRel(160e-9, 1e-3));
    }
    SECTION("width and height labels may be swapped") {
        std::vector<jj::AreaSample> s;
        for (std::size_t i = 0; i < sides.size(); ++i) s.push_back({sides[i], 1.3 * sides[i], 0.0});
        for (auto& x : s) x.resistance = 1.5e-12 / ((x.design_width - 1.6e-7) * (x.design_height - 1.6e-7));
        std::normal_distribution<double> n(0.0, 0.02);
        for (auto& x : s) x.resistance *= 1.0 + n(rng);
        auto swapped = s;
        for (auto& x : swapped) std::swap(x.design_width, x.design_height);
        const auto a = jj::fit_area_scaling(s);
        const auto b = jj::fit_area_scaling(swapped);
        CHECK_THAT(a.specific_resistance, WithinRel(b.specific_resistance, 1e-9));
        CHECK_THAT(a.dimension_bias, WithinRel(b.dimension_bias, 1e-9));
    }
    SECTION("one area only") {
        std::vector<jj::AreaSample> s(6, {1e-6, 1e-6, 2.1});
        CHECK_THROWS_AS(jj::fit_area_scaling(s), scq::RankDeficiencyError);
    }
    SECTION("too few samples") {
        std::vector<jj::AreaSample> s{{1e-6, 1e-6, 2.0}, {2e-6, 2e-6, 0.5}};
        CHECK_THROWS_AS(jj::fit_area_scaling(s), scq::AnalysisError);
    }
}

TEST_CASE("area scaling fit under 3 % noise", "[junction][area][montecarlo]") {
    // Twelve junctions per design size, as on a test chip.
    std::vector<double> replicated;
    for (double s : sides) replicated.insert(replicated.end(), 12, s);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        syn::Rng rng(seed);
        const auto fit = jj::fit_area_scaling(syn::area_samples(1.5e-12, 160e-9, replicated, 0.03, rng));
        ok += oracle::rel(fit.specific_resistance, 1.5e-12) < 0.05 && oracle::rel(fit.dimension_bias, 160e-9) < 0.05;
    }
    CHECK(ok >= 90);
}

TEST_CASE("single-junction area series is limited by the information bound", "[junction][area][montecarlo]") {
    // ln R = ln rho - 2 ln(s - d): the bias is a straight-line slope against
    // x = 2 / (s - d), so its standard error is noise / sqrt(sum (x - mean)^2).
    double mean = 0.0;
    for (double s : sides) mean += 2.0 / (s - 160e-9) / static_cast<double>(sides.size());
    double sxx = 0.0;
    for (double s : sides) sxx += std::pow(2.0 / (s - 160e-9) - mean, 2);
    const double bound = 0.03 / std::sqrt(sxx);
    CHECK_THAT(bound / 160e-9, WithinAbs(0.08, 0.005));

    double spread = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        syn::Rng rng(seed);
        const auto fit = jj::fit_area_scaling(syn::area_samples(1.5e-12, 160e-9, sides, 0.03, rng));
        spread += std::pow(fit.dimension_bias - 160e-9, 2) / 200.0;
    }
    CHECK_THAT(std::sqrt(spread), WithinRel(bound, 0.15));
}

TEST_CASE("exposure power law", "[junction][exposure]") {
    syn::Rng rng(0);
    const auto e = syn::logspace(1.0, 1e8, 8);
    SECTION("exact recovery") {
        const auto fit = jj::fit_exposure_law(syn::exposure_points(1e7, -0.5, e, 0.0, rng));
        CHECK_THAT(fit.prefactor, WithinRel(1e7, 1e-6));
        CHECK_THAT(fit.exponent, WithinRel(-0.5, 1e-6));
    }
    SECTION("fixed exponent") {
        const auto fit = jj::fit_exposure_law(syn::exposure_points(3e6, -0.5, e, 0.0, rng), -0.5);
        CHECK(fit.exponent == -0.5);
        CHECK_THAT(fit.prefactor, WithinRel(3e6, 1e-9));
    }
    SECTION("two identical points") {
        std::vector<jj::ExposurePoint> p{{10.0, 1e6}, {10.0, 1e6}};
        CHECK_THROWS_AS(jj::fit_exposure_law(p), scq::RankDeficiencyError);
    }
    SECTION("non-positive values") {
        std::vector<jj::ExposurePoint> p{{10.0, 1e6}, {-1.0, 1e6}, {100.0, 3e5}};
        CHECK_THROWS_AS(jj::fit_exposure_law(p), scq::DomainError);
    }
    SECTION("per-process prefactors with a shared exponent") {
        const auto hd = syn::exposure_points(1e8, -0.5, syn::logspace(10.0, 1e4, 8), 0.03, rng);
        const auto pe = syn::exposure_points(2e6, -0.5, syn::logspace(10.0, 1e4, 8), 0.03, rng);
        const auto g = jj::fit_exposure_law_grouped({{"HDPCVD", hd}, {"PECVD", pe}});
        REQUIRE(g.prefactors.size() == 2);
        CHECK(g.groups[0] == "HDPCVD");
        CHECK_THAT(g.exponent, WithinAbs(-0.5, 0.03));
        // The PECVD line sits about a factor 50 below HDPCVD.
        CHECK_THAT(g.prefactors[0] / g.prefactors[1], WithinRel(50.0, 0.1));
        const auto fixed = jj::fit_exposure_law_grouped({{"HDPCVD", hd}, {"PECVD", pe}}, -0.5);
        CHECK(fixed.exponent == -0.5);
    }
}

TEST_CASE("annealing model and fit", "[junction][anneal]") {
    CHECK(jj::anneal_model(0.0, 0.023, 240.0) == 1.0);
    CHECK_THAT(jj::anneal_model(240.0, 0.023, 240.0), WithinRel(0.023 + (1 - 0.023) / std::exp(1.0), 1e-12));
    CHECK_THAT(jj::anneal_model(1e6, 0.023, 240.0), WithinRel(0.023, 1e-9));

    const auto times = syn::linspace(180.0, 1800.0, 10);
    syn::Rng rng(0);
    const auto clean = syn::anneal_points(0.023, 240.0, times, 0.0, rng);
    const auto fit = jj::fit_annealing(clean);
    CHECK_THAT(fit.alpha, WithinRel(0.023, 1e-6));
    CHECK_THAT(fit.tau, WithinRel(240.0, 1e-6));

    SECTION("fitted residual is no worse than the generating parameters") {
        auto noisy = syn::anneal_points(0.023, 240.0, times, 0.02, rng);
        const auto f = jj::fit_annealing(noisy);
        double fit_ss = 0, true_ss = 0;
        for (const auto& p : noisy) {
            fit_ss += std::pow(jj::anneal_model(p.time, f.alpha, f.tau) - p.jc_ratio, 2);
            true_ss += std::pow(jj::anneal_model(p.time, 0.023, 240.0) - p.jc_ratio, 2);
        }
        CHECK(fit_ss <= true_ss * (1 + 1e-12));
    }
    SECTION("ratios above one are rejected") {
        auto bad = clean;
        bad[2].jc_ratio = 1.2;
        CHECK_THROWS_AS(jj::fit_annealing(bad), scq::DomainError);
    }
}

TEST_CASE("annealing fit under 2 % noise", "[junction][anneal][montecarlo]") {
    const auto times = syn::linspace(180.0, 1800.0, 10);
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        syn::Rng rng(seed);
        const auto f = jj::fit_annealing(syn::anneal_points(0.023, 240.0, times, 0.02, rng));
        ok += oracle::rel(f.tau, 240.0) < 0.15;
    }
    CHECK(ok >= 90);
}

TEST_CASE("spacer process names", "[junction]") {
    CHECK(jj::spacer_process_from_string("hdpcvd") == jj::SpacerProcess::HDPCVD);
    CHECK(jj::to_string(jj::SpacerProcess::PECVD) == "PECVD");
    CHECK_THROWS_AS(jj::spacer_process_from_string("ALD"), std::invalid_argument);
}
