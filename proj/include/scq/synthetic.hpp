#pragma once

#include "scq/film.hpp"
#include "scq/junction.hpp"
#include "scq/rcsj.hpp"
#include "scq/resonator.hpp"
#include "scq/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

/// Seeded generators of measurement-like data drawn from the toolkit's own
/// forward models. Used by the tests, the acceptance checks and
/// `pipeline synth`.
namespace scq::synthetic {

using Rng = std::mt19937_64;

[[nodiscard]] std::vector<double> linspace(double a, double b, std::size_t n);
[[nodiscard]] std::vector<double> logspace(double a, double b, std::size_t n);

/// Square junctions of the given design sides with multiplicative Gaussian
/// resistance noise of relative size `noise`.
[[nodiscard]] std::vector<junction::AreaSample> area_samples(double specific_resistance, double dimension_bias,
                                                             const std::vector<double>& sides, double noise, Rng& rng);

struct S21Spec {
    double f0 = 6e9;
    double q_internal = 2e5;
    double q_external = 2.6e5;
    double phi = 0.0;
    std::size_t points = 801;
    double span_linewidths = 8.0; ///< on each side of f0
    double noise = 0.0;           ///< std of each quadrature, relative to the off-resonance level
};

[[nodiscard]] ComplexTrace s21_trace(const S21Spec& spec, Rng& rng);

/// A exp(-t / tau) + B with additive Gaussian noise.
[[nodiscard]] Trace decay_trace(double tau, double amplitude, double offset, const std::vector<double>& delays,
                                double noise, Rng& rng);

/// A exp(-t / T2*) cos(2 pi df t + phase) + B with additive Gaussian noise.
[[nodiscard]] Trace ramsey_trace(double t2_star, double detuning, double phase, double amplitude, double offset,
                                 const std::vector<double>& delays, double noise, Rng& rng);

/// Annealing ratios with multiplicative noise.
[[nodiscard]] std::vector<junction::AnnealPoint> anneal_points(double alpha, double tau,
                                                               const std::vector<double>& times, double noise,
                                                               Rng& rng);

[[nodiscard]] std::vector<junction::ExposurePoint> exposure_points(double prefactor, double exponent,
                                                                   const std::vector<double>& exposures, double noise,
                                                                   Rng& rng);

struct RtSpec {
    double tc = 9.2;
    double width = 0.01;           ///< K, logistic width of the transition
    double residual_resistance = 10.0;
    double room_resistance = 40.0; ///< at 300 K
};

/// Normal-state resistance of the R(T) model.
[[nodiscard]] double rt_normal_resistance(const RtSpec& spec, double t);
[[nodiscard]] std::vector<film::RtPoint> rt_points(const RtSpec& spec);

/// Photon-number sweep of Q_i from the TLS-plus-constant model with
/// multiplicative noise.
[[nodiscard]] std::vector<resonator::QiPoint> qi_power_points(const resonator::TlsParams& tls, double q_other, double t,
                                                              double f, const std::vector<double>& photon_numbers,
                                                              double noise, Rng& rng);

/// Temperature sweep of Q_i from the composite TLS plus conductor model.
[[nodiscard]] std::vector<resonator::QiPoint> qi_temperature_points(double f, double tc, double n_ph,
                                                                    double q_other, double f_delta0, double alpha,
                                                                    const std::vector<double>& temperatures,
                                                                    double noise, Rng& rng);

struct BundleOptions {
    std::string wafer_id = "W01";
    std::uint64_t seed = 0;
    bool include_extras = true; ///< anneal, exposure and Q_i sweeps
};

/// The generating parameters of a wafer bundle.
struct BundleTruth {
    struct Resonator {
        std::string file;
        double f0 = 0.0;
        double q_internal = 0.0;
        double q_external = 0.0;
        double phi = 0.0;
    };
    struct Qubit {
        std::string id;
        double design_side = 0.0;
        double c_sigma = 0.0;
        double f_q = 0.0;
        double p_j = 0.0;
        double t1 = 0.0;
        double t2_star = 0.0;
        double t2_echo = 0.0;
        double q1 = 0.0;
    };

    std::string wafer_id;
    std::filesystem::path config;
    double tc = 0.0;
    double rrr = 0.0;
    double specific_resistance = 0.0;
    double dimension_bias = 0.0;
    double ic = 0.0;
    double rn = 0.0;
    double icrn_product = 0.0;
    double jc = 0.0;
    double q_junction = 0.0;
    double q_other = 0.0;
    std::vector<Resonator> resonators;
    std::vector<Qubit> qubits;
    double anneal_alpha = 0.0;
    double anneal_tau = 0.0;
};

/// Writes a complete wafer data set (film, area series, IV, S21, qubit
/// decays and optional extras) plus `pipeline.json` into `dir`.
BundleTruth write_wafer_bundle(const std::filesystem::path& dir, const BundleOptions& options = {});

} // namespace scq::synthetic
