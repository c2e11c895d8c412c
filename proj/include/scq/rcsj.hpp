#pragma once

#include <optional>
#include <span>
#include <vector>

namespace scq::rcsj {

/// Quasiparticle branch: resistance below the gap voltage, normal
/// resistance above it, joined by a tanh rise of relative width `rise_width`.
struct SubgapBranch {
    double resistance = 8e3;     ///< Ohm
    double gap_voltage = 2.8e-3; ///< V, sum-gap voltage
    double rise_width = 0.02;    ///< fraction of gap_voltage
};

struct Junction {
    double ic = 0.0;          ///< A
    double rn = 0.0;          ///< Ohm
    double capacitance = 0.0; ///< F
    std::optional<SubgapBranch> subgap;

    /// Stewart-McCumber parameter 2 pi I_c R_n^2 C / Phi0.
    [[nodiscard]] double beta_c() const;
    void validate() const;
};

/// Junction with the capacitance chosen to give a Stewart-McCumber parameter.
[[nodiscard]] Junction with_beta_c(double ic, double rn, double beta_c);

struct BiasRamp {
    double i_max = 0.0; ///< A
    int n_steps = 200;
    bool both_directions = true;
};

struct Options {
    /// Relative change of the window-averaged voltage that ends a bias step.
    double convergence = 1e-4;
    /// Absolute floor on the averaged normalized voltage V / (I_c R_n).
    double voltage_floor = 1e-7;
    int max_windows = 400;
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
};

struct PhaseState {
    double phase = 0.0;
    double velocity = 0.0; ///< d phase / d tau, tau = t 2 pi I_c R_n / Phi0
    double bias = 0.0;     ///< A, bias applied when the state was taken
};

enum class SweepDirection { Up, Down };

struct IvPoint {
    double current = 0.0; ///< A
    double voltage = 0.0; ///< V, time averaged
    bool converged = true;
};

struct IvTrace {
    std::vector<IvPoint> points;
    SweepDirection direction = SweepDirection::Up;
    /// Too few bias steps to resolve switching and retrapping.
    bool under_resolved = false;
};

struct IvSweep {
    IvTrace up;
    IvTrace down;
    double beta_c = 0.0;
    std::optional<double> switching_current;  ///< A
    std::optional<double> retrapping_current; ///< A
};

/// Steps the bias through `biases` (A), ramping smoothly into each value and
/// holding it until the time-averaged voltage converges. `state` carries the
/// phase between calls so a down-sweep can continue from a running state.
[[nodiscard]] std::vector<IvPoint> sweep(const Junction& junction, std::span<const double> biases,
                                         PhaseState& state, const Options& options = {});

/// Up-sweep from rest (phase and velocity zero) to i_max, then the
/// down-sweep back to zero continuing from the running state.
[[nodiscard]] IvSweep simulate_rcsj_iv(const Junction& junction, const BiasRamp& ramp,
                                       const Options& options = {});

/// First bias (midpoint between grid points) where the voltage leaves or
/// returns to zero, using a threshold fraction of I_c R_n.
[[nodiscard]] std::optional<double> switching_current(const IvTrace& up, double ic_rn, double threshold = 1e-3);
[[nodiscard]] std::optional<double> retrapping_current(const IvTrace& down, double ic_rn, double threshold = 1e-3);

/// Loop area: integral of (V_down - V_up) dI over the common bias grid, in A V.
[[nodiscard]] double hysteresis_area(const IvTrace& up, const IvTrace& down);

/// Overdamped analytic IV: R sqrt(I^2 - I_c^2) above I_c, zero below.
[[nodiscard]] double overdamped_voltage(double current, double ic, double rn);

struct IvParameters {
    double ic = 0.0;           ///< A, switching current of the up-sweep
    double rn = 0.0;           ///< Ohm
    double icrn_product = 0.0; ///< V
};

/// Reads I_c and R_n off a measured up-sweep. The switching threshold is
/// `threshold` times the largest voltage; R_n comes from a straight-line fit
/// of V^2 against I^2 over the resistive points above 60 % of the top bias,
/// which is exact for the overdamped branch and for the ohmic asymptote.
[[nodiscard]] IvParameters extract_iv_parameters(const IvTrace& up, double threshold = 0.02);

/// Large-beta_c retrapping estimate 4 I_c / (pi sqrt(beta_c)).
[[nodiscard]] double retrapping_estimate(double ic, double beta_c);

} // namespace scq::rcsj
