#pragma once

// Compares an analysis report of a synthetic wafer bundle with the
// generator's parameters. Shared by the pipeline tests and the acceptance
// runner so both apply the same tolerances.

#include "scq/qubit.hpp"
#include "scq/report.hpp"
#include "scq/synthetic.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace bundle_check {

class Checker {
public:
    void rel(const std::string& what, double got, double want, double tol) {
        const double r = std::abs(got - want) / std::abs(want);
        ++count_;
        if (!(r <= tol)) fail(what, got, want, "relative", r, tol);
    }
    void abs(const std::string& what, double got, double want, double tol) {
        const double d = std::abs(got - want);
        ++count_;
        if (!(d <= tol)) fail(what, got, want, "absolute", d, tol);
    }
    void require(const std::string& what, bool ok) {
        ++count_;
        if (!ok) failures_.push_back(what);
    }

    [[nodiscard]] const std::vector<std::string>& failures() const { return failures_; }
    [[nodiscard]] int count() const { return count_; }

private:
    void fail(const std::string& what, double got, double want, const char* kind, double err, double tol) {
        std::ostringstream os;
        os.precision(6);
        os << what << ": got " << got << ", want " << want << " (" << kind << " error " << err << " > " << tol << ")";
        failures_.push_back(os.str());
    }

    std::vector<std::string> failures_;
    int count_ = 0;
};

/// Returns one message per quantity outside its tolerance; empty on success.
inline Checker compare(const scq::report::AnalysisReport& rep, const scq::synthetic::BundleTruth& truth) {
    Checker c;
    c.require("report status is complete", rep.status == "complete" && rep.errors.empty());

    c.require("one film row", rep.film.size() == 1);
    if (rep.film.size() == 1) {
        c.abs("tc", rep.film[0].film.tc, truth.tc, 0.01);
        c.rel("rrr", rep.film[0].film.rrr, truth.rrr, 0.01);
    }

    c.require("one calibration row", rep.calibrations.size() == 1);
    if (rep.calibrations.size() == 1) {
        const auto& cal = rep.calibrations[0];
        c.rel("specific resistance", cal.calibration.specific_resistance, truth.specific_resistance, 0.05);
        c.rel("dimension bias", cal.calibration.dimension_bias, truth.dimension_bias, 0.05);
        c.rel("Ic", cal.ic, truth.ic, 0.03);
        c.rel("Rn", cal.rn, truth.rn, 0.01);
        c.rel("IcRn", cal.calibration.icrn_product, truth.icrn_product, 0.02);
        c.rel("Jc", cal.calibration.jc, truth.jc, 0.05);
    }

    c.require("resonator count", rep.resonators.size() == truth.resonators.size());
    for (const auto& t : truth.resonators) {
        bool found = false;
        for (const auto& r : rep.resonators) {
            if (r.source != t.file) continue;
            found = true;
            c.rel(t.file + " f0", r.f0, t.f0, 0.02);
            c.rel(t.file + " Qi", r.q_internal, t.q_internal, 0.02);
            c.rel(t.file + " Qe", r.q_external, t.q_external, 0.02);
            c.rel(t.file + " phi", r.phi, t.phi, 0.02);
            const double lhs = 1.0 / r.q_total;
            const double rhs = 1.0 / r.q_internal + std::cos(r.phi) / r.q_external;
            c.rel(t.file + " 1/Q identity", lhs, rhs, 1e-9);
        }
        c.require(t.file + " present", found);
    }

    c.require("qubit count", rep.qubits.size() == truth.qubits.size());
    std::vector<scq::qubit::BudgetPoint> budget;
    for (const auto& t : truth.qubits) {
        bool found = false;
        for (const auto& q : rep.qubits) {
            if (q.qubit_id != t.id) continue;
            found = true;
            c.rel(t.id + " f_q", q.record.f_q, t.f_q, 1e-9);
            c.rel(t.id + " T1", q.record.t1, t.t1, 0.10);
            c.rel(t.id + " T2*", q.record.t2_star, t.t2_star, 0.10);
            c.rel(t.id + " T2 echo", q.record.t2_echo, t.t2_echo, 0.05);
            c.rel(t.id + " Q1", q.record.q1, t.q1, 0.10);
            c.require(t.id + " transmon parameters", q.transmon.has_value());
            if (q.transmon) {
                c.rel(t.id + " p_j", q.transmon->participation_pj, t.p_j, 0.05);
                c.rel(t.id + " f01 design", q.transmon->f01, t.f_q, 0.05);
                budget.push_back({q.transmon->participation_pj, q.record.q1});
            }
        }
        c.require(t.id + " present", found);
    }
    if (budget.size() >= 3) {
        const auto fit = scq::qubit::loss_budget_fit(budget);
        c.rel("Q_J", fit.q_junction, truth.q_junction, 0.05);
        c.rel("Q_0", fit.q_other, truth.q_other, 0.05);
    }

    if (truth.anneal_tau > 0.0) {
        c.require("one anneal row", rep.anneals.size() == 1);
        for (const auto& a : rep.anneals) {
            c.rel("anneal alpha", a.alpha, truth.anneal_alpha, 0.15);
            c.rel("anneal tau", a.tau, truth.anneal_tau, 0.15);
        }
        c.require("two exposure rows", rep.exposures.size() == 2);
        for (const auto& e : rep.exposures) {
            const double k = e.spacer_process == scq::junction::SpacerProcess::HDPCVD ? 1.0e8 : 2.0e6;
            c.rel(e.source + " prefactor", e.prefactor, k, 0.15);
            c.abs(e.source + " exponent", e.exponent, -0.5, 0.025);
        }
        c.require("one Q_i(n) row", rep.qi_power.size() == 1);
        for (const auto& q : rep.qi_power) {
            c.require("Q_i(n) model", q.model == "tls_plus_constant");
            c.rel("Q_i(n) F delta0", q.f_delta0, 1.0e-5, 0.10);
            c.rel("Q_i(n) n_c", q.n_c, 10.0, 0.10);
            c.rel("Q_i(n) beta", q.beta, 0.5, 0.10);
            c.rel("Q_i(n) Q_other", q.q_other, 1.0e6, 0.10);
        }
        c.require("one Q_i(T) row", rep.qi_temperature.size() == 1);
        for (const auto& q : rep.qi_temperature) {
            c.rel("Q_i(T) F delta0", q.f_delta0, 1.0e-5, 0.15);
            c.rel("Q_i(T) alpha", q.alpha_kin, 0.1, 0.15);
            c.rel("Q_i(T) Q_other", q.q_other, 5.0e5, 0.15);
        }
    }
    return c;
}

} // namespace bundle_check
