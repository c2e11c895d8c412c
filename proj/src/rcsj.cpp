#include "scq/rcsj.hpp"

#include "scq/constants.hpp"
#include "scq/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace scq::rcsj {

namespace {

using State = std::array<double, 2>;
namespace odeint = boost::numeric::odeint;
constexpr double kTwoPi = 2.0 * constants::pi;
constexpr std::size_t kMinSlips = 8;
constexpr double kMaxWindow = 1e5; // tau units

// Dimensionless RCSJ equation
//   beta_c phi'' + g(phi') phi' + sin(phi) = i(tau)
// with g = R_n / R(V) the branch-dependent damping.
struct Dynamics {
    double beta_c;
    double subgap_damping; // R_n / R_s, or 1 without a subgap branch
    double gap_velocity;   // gap voltage / (I_c R_n), or 0 without a subgap branch
    double gap_width;      // voltage scale of the rise at the gap, same units
    double i_from;
    double i_to;
    double ramp_start;
    double ramp_length;

    [[nodiscard]] double bias(double tau) const {
        if (ramp_length <= 0.0) return i_to;
        const double f = (tau - ramp_start) / ramp_length;
        if (f <= 0.0) return i_from;
        if (f >= 1.0) return i_to;
        return i_from + f * (i_to - i_from);
    }

    void operator()(const State& x, State& dxdt, double tau) const {
        const double v = x[1];
        double g = 1.0;
        if (gap_velocity > 0.0) {
            // A hard step in damping makes the running state chatter on the
            // gap edge; a tanh rise gives it a well-defined operating point.
            const double s = 0.5 * (1.0 + std::tanh((std::abs(v) - gap_velocity) / gap_width));
            g = subgap_damping + (1.0 - subgap_damping) * s;
        }
        dxdt[0] = v;
        dxdt[1] = (bias(tau) - std::sin(x[0]) - g * v) / beta_c;
    }
};

struct Crossing {
    double time;
    double level; // integer index of the 2 pi multiple crossed
};

} // namespace

double Junction::beta_c() const {
    return kTwoPi * ic * rn * rn * capacitance / constants::flux_quantum;
}

void Junction::validate() const {
    if (!(ic > 0.0) || !(rn > 0.0) || !(capacitance > 0.0)) {
        throw DomainError("RCSJ junction needs positive ic, rn and capacitance");
    }
    if (subgap && (!(subgap->resistance > 0.0) || !(subgap->gap_voltage > 0.0) || !(subgap->rise_width > 0.0))) {
        throw DomainError("subgap branch needs positive resistance, gap voltage and rise width");
    }
}

Junction with_beta_c(double ic, double rn, double beta_c) {
    Junction j;
    j.ic = ic;
    j.rn = rn;
    j.capacitance = beta_c * constants::flux_quantum / (kTwoPi * ic * rn * rn);
    return j;
}

std::vector<IvPoint> sweep(const Junction& junction, std::span<const double> biases, PhaseState& state,
                           const Options& options) {
    junction.validate();
    const double beta = junction.beta_c();
    const double icrn = junction.ic * junction.rn;

    Dynamics dyn{};
    dyn.beta_c = beta;
    dyn.subgap_damping = junction.subgap ? junction.rn / junction.subgap->resistance : 1.0;
    dyn.gap_velocity = junction.subgap ? junction.subgap->gap_voltage / icrn : 0.0;
    dyn.gap_width = junction.subgap ? junction.subgap->rise_width * dyn.gap_velocity : 1.0;

    // Plasma period in tau units is 2 pi sqrt(beta_c); ramps span several of
    // them to avoid ringing-induced early switching.
    const double plasma_period = kTwoPi * std::sqrt(beta);
    const double ramp_length = std::max(5.0, 4.0 * plasma_period);
    const double window = std::max(50.0, 10.0 * plasma_period);

    auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, odeint::runge_kutta_dopri5<State>());
    State x{state.phase, state.velocity};
    double tau = 0.0;
    double current_bias = state.bias / junction.ic;
    std::vector<Crossing> crossings;

    // Time at which the phase passes level * 2 pi inside the last step.
    auto locate = [&](double t0, double t1, double level, bool rising) {
        double a = t0;
        double b = t1;
        State xm{};
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (a + b);
            stepper.calc_state(mid, xm);
            const bool past = rising ? xm[0] >= level * kTwoPi : xm[0] < level * kTwoPi;
            (past ? b : a) = mid;
        }
        return 0.5 * (a + b);
    };

    // Integrates to t_end, recording 2 pi crossings. Steps are far shorter
    // than a slip period, so at most one multiple of 2 pi is crossed per step.
    auto advance_to = [&](double t_end) {
        while (stepper.current_time() < t_end) {
            const double t0 = stepper.current_time();
            const double phi0 = stepper.current_state()[0];
            stepper.do_step(dyn);
            double t1 = stepper.current_time();
            State x1 = stepper.current_state();
            const bool overshoot = t1 > t_end;
            if (overshoot) {
                stepper.calc_state(t_end, x1);
                t1 = t_end;
            }
            const double k0 = std::floor(phi0 / kTwoPi);
            const double k1 = std::floor(x1[0] / kTwoPi);
            if (k0 != k1) {
                const bool rising = x1[0] > phi0;
                const double level = rising ? k1 : k0;
                crossings.push_back({locate(t0, t1, level, rising), level});
            }
            if (overshoot) {
                stepper.initialize(x1, t_end, stepper.current_time_step());
            }
        }
    };

    std::vector<IvPoint> out;
    out.reserve(biases.size());

    for (double bias : biases) {
        const double target = bias / junction.ic;
        dyn.i_from = current_bias;
        dyn.i_to = target;
        dyn.ramp_start = tau;
        dyn.ramp_length = ramp_length;
        stepper.initialize(x, tau, 1e-3);

        advance_to(tau + ramp_length);
        double t_start = stepper.current_time();
        double phi_start = stepper.current_state()[0];

        double previous = std::nan("");
        double v_avg = 0.0;
        bool converged = false;
        double span = window;
        bool comparable = false;
        for (int w = 0; w < options.max_windows; ++w) {
            crossings.clear();
            advance_to(t_start + span);
            const double t_end = stepper.current_time();
            const double phi_end = stepper.current_state()[0];
            const double advance = phi_end - phi_start;

            v_avg = advance / (t_end - t_start);
            if (std::abs(advance) >= 2.0 * kTwoPi && crossings.size() >= 3) {
                // Average over whole slip periods to remove the phase ripple.
                const Crossing& first = crossings.front();
                const Crossing& last = crossings.back();
                const double slips = last.level - first.level;
                if (last.time > first.time && slips * advance > 0.0) {
                    v_avg = kTwoPi * slips / (last.time - first.time);
                }
            }
            // Near I_c the slip period diverges; a window holding only a few
            // slips averages the ripple badly, so it grows until it spans
            // kMinSlips of them.
            if (!crossings.empty() && crossings.size() < kMinSlips && span < kMaxWindow) {
                span *= 2.0;
                comparable = false;
                t_start = t_end;
                phi_start = phi_end;
                continue;
            }
            if (comparable &&
                std::abs(v_avg - previous) <= options.convergence * std::abs(v_avg) + options.voltage_floor) {
                converged = true;
                break;
            }
            comparable = true;
            previous = v_avg;
            t_start = t_end;
            phi_start = phi_end;
        }
        tau = stepper.current_time();
        x = stepper.current_state();
        current_bias = target;
        out.push_back({bias, v_avg * icrn, converged});
    }
    state.phase = x[0];
    state.velocity = x[1];
    state.bias = current_bias * junction.ic;
    return out;
}

IvSweep simulate_rcsj_iv(const Junction& junction, const BiasRamp& ramp, const Options& options) {
    junction.validate();
    if (!(ramp.i_max > 0.0) || ramp.n_steps <= 0) {
        throw DomainError("bias ramp needs positive i_max and step count");
    }
    std::vector<double> up_bias;
    for (int k = 0; k <= ramp.n_steps; ++k) up_bias.push_back(ramp.i_max * k / ramp.n_steps);

    IvSweep out;
    out.beta_c = junction.beta_c();
    PhaseState state;
    out.up.direction = SweepDirection::Up;
    out.up.points = sweep(junction, up_bias, state, options);
    out.up.under_resolved = ramp.n_steps < 100;
    const double icrn = junction.ic * junction.rn;
    out.switching_current = switching_current(out.up, icrn);
    if (ramp.both_directions) {
        std::vector<double> down_bias(up_bias.rbegin(), up_bias.rend());
        out.down.direction = SweepDirection::Down;
        out.down.points = sweep(junction, down_bias, state, options);
        out.down.under_resolved = out.up.under_resolved;
        out.retrapping_current = retrapping_current(out.down, icrn);
    }
    return out;
}

std::optional<double> switching_current(const IvTrace& up, double ic_rn, double threshold) {
    const double v_thr = threshold * ic_rn;
    for (std::size_t i = 1; i < up.points.size(); ++i) {
        if (std::abs(up.points[i].voltage) > v_thr && std::abs(up.points[i - 1].voltage) <= v_thr) {
            return 0.5 * (up.points[i].current + up.points[i - 1].current);
        }
    }
    return std::nullopt;
}

std::optional<double> retrapping_current(const IvTrace& down, double ic_rn, double threshold) {
    const double v_thr = threshold * ic_rn;
    for (std::size_t i = 1; i < down.points.size(); ++i) {
        if (std::abs(down.points[i].voltage) <= v_thr && std::abs(down.points[i - 1].voltage) > v_thr) {
            return 0.5 * (down.points[i].current + down.points[i - 1].current);
        }
    }
    return std::nullopt;
}

IvParameters extract_iv_parameters(const IvTrace& up, double threshold) {
    if (up.points.size() < 10) throw AnalysisError("IV trace needs at least 10 points");
    double v_max = 0.0;
    double i_max = 0.0;
    for (const auto& p : up.points) {
        v_max = std::max(v_max, std::abs(p.voltage));
        i_max = std::max(i_max, std::abs(p.current));
    }
    if (!(v_max > 0.0)) throw AnalysisError("IV trace never leaves the zero-voltage branch");
    const auto ic = switching_current(up, v_max, threshold);
    if (!ic) throw AnalysisError("no switching event in the IV up-sweep");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const auto& p : up.points) {
        if (std::abs(p.current) < 0.6 * i_max || std::abs(p.voltage) <= threshold * v_max) continue;
        const double x = p.current * p.current;
        const double y = p.voltage * p.voltage;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 3) throw AnalysisError("too few resistive points above 60 % of the top bias to estimate R_n");
    const double nn = static_cast<double>(n);
    const double denom = nn * sxx - sx * sx;
    if (!(denom > 0.0)) throw AnalysisError("resistive branch does not span a current range");
    const double slope = (nn * sxy - sx * sy) / denom;
    if (!(slope > 0.0)) throw AnalysisError("resistive branch has non-positive slope");
    IvParameters out;
    out.ic = *ic;
    out.rn = std::sqrt(slope);
    out.icrn_product = out.ic * out.rn;
    return out;
}

double hysteresis_area(const IvTrace& up, const IvTrace& down) {
    if (up.points.size() != down.points.size()) {
        throw std::invalid_argument("up and down sweeps must share a bias grid");
    }
    const std::size_t n = up.points.size();
    double area = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const auto& u0 = up.points[i - 1];
        const auto& u1 = up.points[i];
        const auto& d0 = down.points[n - i];
        const auto& d1 = down.points[n - 1 - i];
        area += 0.5 * ((d0.voltage - u0.voltage) + (d1.voltage - u1.voltage)) * (u1.current - u0.current);
    }
    return area;
}

double overdamped_voltage(double current, double ic, double rn) {
    const double a = std::abs(current);
    if (a <= ic) return 0.0;
    return std::copysign(rn * std::sqrt(a * a - ic * ic), current);
}

double retrapping_estimate(double ic, double beta_c) {
    if (!(beta_c > 0.0)) throw DomainError("beta_c must be positive");
    return 4.0 * ic / (constants::pi * std::sqrt(beta_c));
}

} // namespace scq::rcsj
