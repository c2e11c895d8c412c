#include "oracles.hpp"

#include "scq/errors.hpp"
#include "scq/rcsj.hpp"
#include "scq/synthetic.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace rcsj = scq::rcsj;

namespace {
constexpr double ic = 38e-6;
constexpr double rn = 39.0;
constexpr double icrn = ic * rn;
} // namespace

TEST_CASE("Stewart-McCumber parameter", "[rcsj]") {
    const auto j = rcsj::with_beta_c(ic, rn, 25.0);
    CHECK_THAT(j.beta_c(), WithinRel(25.0, 1e-12));
    CHECK_THAT(j.capacitance, WithinRel(25.0 * oracle::phi0 / (2 * oracle::pi * ic * rn * rn), 1e-12));
    rcsj::Junction bad{-1.0, rn, 1e-12, std::nullopt};
    CHECK_THROWS(bad.validate());
}

TEST_CASE("overdamped junction follows R sqrt(I^2 - Ic^2)", "[rcsj][oracle]") {
    const auto j = rcsj::with_beta_c(ic, rn, 0.01);
    rcsj::PhaseState state;
    std::vector<double> biases;
    for (double x = 1.05; x <= 3.0 + 1e-12; x += 0.05) biases.push_back(x * ic);
    const auto pts = rcsj::sweep(j, biases, state);
    for (const auto& p : pts) {
        const double expected = rn * std::sqrt(p.current * p.current - ic * ic);
        INFO("I/Ic = " << p.current / ic);
        CHECK_THAT(p.voltage, WithinRel(expected, 0.01));
        CHECK_THAT(rcsj::overdamped_voltage(p.current, ic, rn), WithinRel(expected, 1e-12));
    }
    CHECK(rcsj::overdamped_voltage(0.5 * ic, ic, rn) == 0.0);
}

TEST_CASE("zero voltage below Ic from rest", "[rcsj]") {
    const auto j = rcsj::with_beta_c(ic, rn, 4.0);
    rcsj::PhaseState state;
    const std::vector<double> biases{0.2 * ic, 0.5 * ic, 0.8 * ic, 0.95 * ic};
    for (const auto& p : rcsj::sweep(j, biases, state)) CHECK(std::abs(p.voltage) < 1e-6 * icrn);
}

TEST_CASE("underdamped junction is hysteretic", "[rcsj][hysteresis]") {
    const auto j = rcsj::with_beta_c(ic, rn, 25.0);
    const auto iv = rcsj::simulate_rcsj_iv(j, {2.0 * ic, 160, true});
    REQUIRE(iv.switching_current.has_value());
    REQUIRE(iv.retrapping_current.has_value());
    CHECK(*iv.retrapping_current < *iv.switching_current);
    CHECK_THAT(*iv.switching_current, WithinRel(ic, 0.03));
    // Large-beta_c estimate 4 Ic / (pi sqrt(beta_c)).
    CHECK_THAT(*iv.retrapping_current, WithinRel(rcsj::retrapping_estimate(ic, 25.0), 0.2));
    CHECK(rcsj::hysteresis_area(iv.up, iv.down) > 0.0);
    CHECK_FALSE(iv.up.under_resolved);
}

TEST_CASE("overdamped loop closes", "[rcsj][hysteresis][property]") {
    const auto j = rcsj::with_beta_c(ic, rn, 0.05);
    const auto iv = rcsj::simulate_rcsj_iv(j, {2.0 * ic, 80, true});
    const double area = rcsj::hysteresis_area(iv.up, iv.down);
    CHECK(area >= -1e-3 * ic * icrn);
    CHECK(std::abs(area) <= 1e-3 * ic * icrn);
}

TEST_CASE("IV is antisymmetric under (I, V) -> (-I, -V)", "[rcsj][property]") {
    for (double beta : {0.1, 4.0}) {
        const auto j = rcsj::with_beta_c(ic, rn, beta);
        std::vector<double> pos, neg;
        for (double x = 0.0; x <= 2.5; x += 0.125) {
            pos.push_back(x * ic);
            neg.push_back(-x * ic);
        }
        rcsj::PhaseState sp, sn;
        const auto up = rcsj::sweep(j, pos, sp);
        const auto dn = rcsj::sweep(j, neg, sn);
        for (std::size_t i = 0; i < up.size(); ++i) {
            CHECK_THAT(dn[i].voltage, WithinAbs(-up[i].voltage, 1e-6 * icrn));
        }
    }
}

TEST_CASE("coarse bias grids are flagged", "[rcsj]") {
    const auto j = rcsj::with_beta_c(ic, rn, 25.0);
    const auto iv = rcsj::simulate_rcsj_iv(j, {2.0 * ic, 4, true});
    CHECK(iv.up.under_resolved);
}

TEST_CASE("subgap branch lowers the retrapping voltage scale", "[rcsj][subgap]") {
    auto j = rcsj::with_beta_c(ic, rn, 25.0);
    j.subgap = rcsj::SubgapBranch{};
    const auto iv = rcsj::simulate_rcsj_iv(j, {2.5 * ic, 150, true});
    REQUIRE(iv.switching_current.has_value());
    REQUIRE(iv.retrapping_current.has_value());
    CHECK(*iv.retrapping_current < *iv.switching_current);
    // With a large subgap resistance the running state survives to lower bias.
    const auto plain = rcsj::simulate_rcsj_iv(rcsj::with_beta_c(ic, rn, 25.0), {2.5 * ic, 150, true});
    CHECK(*iv.retrapping_current <= *plain.retrapping_current);
}

TEST_CASE("Ic and Rn read off an up-sweep", "[rcsj][extract]") {
    const auto j = rcsj::with_beta_c(ic, rn, 0.05);
    const auto iv = rcsj::simulate_rcsj_iv(j, {3.0 * ic, 120, false});
    const auto p = rcsj::extract_iv_parameters(iv.up);
    CHECK_THAT(p.ic, WithinRel(ic, 0.03));
    CHECK_THAT(p.rn, WithinRel(rn, 0.01));
    CHECK_THAT(p.icrn_product, WithinRel(p.ic * p.rn, 1e-12));
}

TEST_CASE("extracted product of a 38 uA, 39 ohm junction is near 1.5 mV", "[rcsj][extract]") {
    const auto j = rcsj::with_beta_c(ic, rn, 4.0);
    const auto iv = rcsj::simulate_rcsj_iv(j, {2.5 * ic, 120, true});
    const auto p = rcsj::extract_iv_parameters(iv.up);
    CHECK_THAT(p.icrn_product, WithinRel(1.5e-3, 0.02));
}
