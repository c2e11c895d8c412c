#include "oracles.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"
#include "scq/physics.hpp"
#include "scq/quadrature.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using Catch::Matchers::WithinRel;
using Catch::Matchers::WithinAbs;

namespace {
constexpr double nb_tc = 9.2;
const double nb_delta = 1.76 * oracle::kB_eV * nb_tc;
} // namespace

TEST_CASE("BCS gap from the critical temperature", "[physics][gap]") {
    CHECK_THAT(scq::delta0_from_tc(9.2), WithinRel(1.395e-3, 1e-3));
    CHECK_THAT(scq::delta0_from_tc(1.2), WithinRel(0.182e-3, 3e-3));
    CHECK_THAT(scq::delta0_from_tc(9.2), WithinRel(nb_delta, 1e-12));

    // Linear through the origin.
    CHECK_THAT(scq::delta0_from_tc(1e-6) / 1e-6, WithinRel(scq::delta0_from_tc(1.0), 1e-12));
    for (double tc : {0.3, 1.2, 4.0, 9.2, 18.0}) {
        CHECK_THAT(scq::tc_from_delta0(scq::delta0_from_tc(tc)), WithinRel(tc, 1e-15));
        CHECK_THAT(scq::delta0_from_tc(2.0 * tc), WithinRel(2.0 * scq::delta0_from_tc(tc), 1e-15));
    }

    CHECK_THROWS_AS(scq::delta0_from_tc(0.0), scq::DomainError);
    CHECK_THROWS_AS(scq::delta0_from_tc(-1.0), scq::DomainError);
}

TEST_CASE("gap follows the tanh interpolation", "[physics][gap]") {
    const double d0 = scq::delta0_from_tc(nb_tc);
    CHECK(scq::gap_vs_temperature(d0, nb_tc, 0.0).delta == d0);
    CHECK_FALSE(scq::gap_vs_temperature(d0, nb_tc, 0.0).normal_state);

    const auto half = scq::gap_vs_temperature(d0, nb_tc, 0.5 * nb_tc);
    CHECK_THAT(half.delta / d0, WithinRel(std::tanh(1.74), 1e-12));
    CHECK_THAT(half.delta / d0, WithinAbs(0.9403, 1e-4));

    const auto near = scq::gap_vs_temperature(d0, nb_tc, nb_tc * (1 - 1e-9));
    CHECK(near.delta < 1e-3 * d0);

    const auto normal = scq::gap_vs_temperature(d0, nb_tc, nb_tc);
    CHECK(normal.normal_state);
    CHECK(normal.delta == 0.0);
    CHECK(scq::gap_vs_temperature(d0, nb_tc, 12.0).normal_state);

    double prev = d0;
    for (double t = 0.1; t < nb_tc; t += 0.1) {
        const double d = scq::gap_vs_temperature(d0, nb_tc, t).delta;
        CHECK(d <= prev);
        prev = d;
    }
}

TEST_CASE("sum-gap voltage of a Nb junction", "[physics][gap]") {
    const double d = scq::delta0_from_tc(nb_tc);
    CHECK_THAT(scq::sum_gap_voltage(d, d), WithinRel(2.0 * d, 1e-12));
    CHECK_THAT(scq::sum_gap_voltage(d, d), WithinRel(2.79e-3, 2e-3));
}

TEST_CASE("adaptive quadrature handles smooth and peaked integrands", "[physics][quadrature]") {
    const auto r = scq::quad::integrate([](double x) { return std::sin(x); }, 0.0, oracle::pi);
    CHECK(r.converged);
    CHECK_THAT(r.value, WithinRel(2.0, 1e-12));

    const auto peaked = scq::quad::integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
    CHECK(peaked.converged);
    CHECK_THAT(peaked.value, WithinRel(2.0 / 1e-2 * std::atan(1.0 / 1e-2), 1e-9));
}

TEST_CASE("Mattis-Bardeen sigma1 vanishes at low temperature", "[physics][mb]") {
    const auto r = scq::mattis_bardeen(6e9, 0.01 * nb_tc, nb_delta);
    CHECK(r.sigma1_over_sigman >= 0.0);
    CHECK(r.sigma1_over_sigman < 1e-8);

    const auto zero = scq::mattis_bardeen(6e9, 0.0, nb_delta);
    CHECK(zero.sigma1_over_sigman == 0.0);
    CHECK(zero.sigma2_over_sigman > 0.0);
}

TEST_CASE("Mattis-Bardeen sigma2 reaches pi Delta / hbar omega", "[physics][mb]") {
    const double f = 1e9;
    const auto r = scq::mattis_bardeen(f, 0.1 * nb_tc, nb_delta);
    const double hw = oracle::h_eVs * f;
    CHECK_THAT(r.sigma2_over_sigman, WithinRel(oracle::pi * nb_delta / hw, 0.02));
}

TEST_CASE("Mattis-Bardeen agrees with a dense fixed-grid oracle", "[physics][mb][oracle]") {
    struct Case {
        double f, t, delta;
    };
    const double al_delta = 1.76 * oracle::kB_eV * 1.2;
    const Case cases[] = {
        {6e9, 0.3 * nb_tc, nb_delta}, {6e9, 0.5 * nb_tc, nb_delta}, {20e9, 0.4 * nb_tc, nb_delta},
        {5e9, 0.25, al_delta},        {5e9, 0.4, al_delta},         {1e9, 0.1 * nb_tc, nb_delta},
    };
    for (const auto& c : cases) {
        const auto lib = scq::mattis_bardeen(c.f, c.t, c.delta);
        const auto ref = oracle::mattis_bardeen_dense(c.f, c.t, c.delta);
        INFO("f=" << c.f << " t=" << c.t);
        CHECK_THAT(lib.sigma2_over_sigman, WithinRel(ref.s2, 1e-6));
        CHECK_THAT(lib.sigma1_over_sigman, WithinRel(ref.s1, 1e-5));
    }
}

TEST_CASE("Mattis-Bardeen is stable under tolerance halving", "[physics][mb]") {
    for (double t : {0.5, 1.0, 2.0, 4.0, 6.0}) {
        scq::MattisBardeenOptions loose;
        scq::MattisBardeenOptions tight;
        tight.tolerance = loose.tolerance / 2.0;
        const double d = scq::gap_vs_temperature(nb_delta, nb_tc, t).delta;
        const auto a = scq::mattis_bardeen(6e9, t, d, loose);
        const auto b = scq::mattis_bardeen(6e9, t, d, tight);
        CHECK_THAT(a.sigma1_over_sigman, WithinRel(b.sigma1_over_sigman, 1e-6));
        CHECK_THAT(a.sigma2_over_sigman, WithinRel(b.sigma2_over_sigman, 1e-6));
    }
}

TEST_CASE("Mattis-Bardeen ratios are non-negative and sigma2 falls with temperature", "[physics][mb][property]") {
    for (double f : {2e9, 6e9, 12e9}) {
        double prev = INFINITY;
        for (double t = 0.2; t < 8.0; t += 0.4) {
            const auto r = scq::mattis_bardeen(f, t, nb_delta);
            CHECK(r.sigma1_over_sigman >= 0.0);
            CHECK(r.sigma2_over_sigman >= 0.0);
            CHECK(r.sigma2_over_sigman < prev);
            prev = r.sigma2_over_sigman;
        }
    }
    // With the gap following temperature, sigma2 collapses towards tc.
    const double near_tc = scq::gap_vs_temperature(nb_delta, nb_tc, 9.19).delta;
    const double low = scq::mattis_bardeen(6e9, 1.0, nb_delta).sigma2_over_sigman;
    CHECK(scq::mattis_bardeen(6e9, 9.19, near_tc).sigma2_over_sigman < 0.1 * low);
}

TEST_CASE("Mattis-Bardeen refuses the pair-breaking regime", "[physics][mb]") {
    const double f_gap = 2.0 * nb_delta / oracle::h_eVs;
    CHECK_THROWS_AS(scq::mattis_bardeen(1.01 * f_gap, 1.0, nb_delta), scq::UnsupportedRegimeError);
    CHECK_THROWS_AS(scq::mattis_bardeen(-1.0, 1.0, nb_delta), scq::DomainError);
    CHECK_THROWS_AS(scq::mattis_bardeen(6e9, -1.0, nb_delta), scq::DomainError);
    CHECK_THROWS_AS(scq::mattis_bardeen(6e9, 1.0, 0.0), scq::DomainError);
}

TEST_CASE("thermal quasiparticle density", "[physics][qp]") {
    const double al = 0.182e-3;
    const double t = 0.160;
    const double kt = oracle::kB_eV * t;
    const double expected = std::sqrt(2 * oracle::pi * kt / al) * std::exp(-al / kt);
    CHECK_THAT(scq::quasiparticle_density(t, al), WithinRel(expected, 1e-12));
    CHECK_THAT(kt / al, WithinRel(0.0758, 2e-3));
    CHECK_THAT(al / kt, WithinRel(13.2, 1e-2));

    // The Nb/Al ratio is about 89 e-folds, i.e. 38.6 decades.
    const double nb = scq::quasiparticle_density(t, 1.395e-3);
    const double ln_ratio = std::log(scq::quasiparticle_density(t, al)) - std::log(nb);
    CHECK(ln_ratio > 40.0);
    CHECK_THAT(ln_ratio, WithinRel((1.395e-3 - al) / kt + 0.5 * std::log(1.395e-3 / al), 1e-9));
    CHECK(ln_ratio / std::log(10.0) > 38.0);

    CHECK(scq::quasiparticle_density(0.0, al) == 0.0);
    double prev = 0.0;
    for (double temp = 0.05; temp < 2.0; temp += 0.05) {
        const double x = scq::quasiparticle_density(temp, al);
        CHECK(x > prev);
        CHECK(scq::quasiparticle_density(temp, 1.1 * al) < x);
        prev = x;
    }
}

TEST_CASE("superconductor parameters from tc", "[physics]") {
    const auto p = scq::SuperconductorParams::from_tc(9.2);
    CHECK(p.tc == 9.2);
    CHECK_THAT(p.delta0, WithinRel(nb_delta, 1e-12));
    CHECK_NOTHROW(p.validate());
}
