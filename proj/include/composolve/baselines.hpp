#pragma once

#include <cmath>
#include <cstdio>
#include <chrono>
#include <limits>
#include <string>

#include "errors.hpp"
#include "problem.hpp"
#include "report.hpp"
#include "trace.hpp"

namespace composolve {

/// Single-loop primal-dual probes for equality-constrained problems. They
/// exist as comparison points and as linear-span methods for the lower-bound
/// checks, so the updates are written exactly as stated, no extras.
enum class SingleLoopMethod { chambolle_pock, ogda, linearized_alm };

inline const char* single_loop_method_name(SingleLoopMethod m) {
    switch (m) {
        case SingleLoopMethod::chambolle_pock: return "cp";
        case SingleLoopMethod::ogda: return "ogda";
        case SingleLoopMethod::linearized_alm: return "lalm";
    }
    return "unknown";
}

struct SingleLoopConfig {
    SingleLoopMethod method = SingleLoopMethod::chambolle_pock;
    double eta1 = 0.0;        ///< 0 picks the documented default
    double eta2 = 0.0;
    double rho_penalty = -1.0; ///< linearized_alm only; <0 picks L_f/L_A^2
    long long T = 0;
    Vector x_star;            ///< optional; fills the distance column
};

namespace detail {

inline Index exact_support_size(const Vector& x) {
    Index c = 0;
    for (Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0) ++c;
    return c;
}

inline void check_divergence(const Vector& x, const Vector& lam, long long k,
                             const char* method) {
    if (x.norm() > 1e12 || lam.norm() > 1e12) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "%s: iterates exceeded 1e12 at iteration %lld; "
                      "reduce eta1/eta2", method, k);
        throw DivergenceError(msg, k);
    }
}

} // namespace detail

/// Default steps (overridable):
///   chambolle_pock: eta1 = 1/(2 L_f), eta2 = L_f/L_A^2  (eta1 eta2 L_A^2 = 1/2)
///   ogda:           eta1 = eta2 = 1/(4 (L_f + L_A))
///   linearized_alm: rho = L_f/L_A^2, eta1 = 1/(2(L_f + rho L_A^2)), eta2 = rho
inline SolverReport run_single_loop(const CompositeProblem& p, const Vector& x0,
                                    const Vector& lambda0, const SingleLoopConfig& cfg,
                                    const RunHooks& hooks = {}) {
    if (p.h.kind != ProxKind::indicator_zero)
        throw UnsupportedProxError(prox_kind_name(p.h.kind),
            "run_single_loop: baselines handle equality constraints only");
    if (cfg.T < 1) throw ParameterError("run_single_loop: T must be >= 1");
    if (x0.size() != p.A.n || lambda0.size() != p.A.m)
        throw ParameterError("run_single_loop: x0/lambda0 dimension mismatch");

    const double L_f = p.f.L_f, L_A = p.A.L_A;
    const char* name = single_loop_method_name(cfg.method);
    double eta1 = cfg.eta1, eta2 = cfg.eta2, rho = cfg.rho_penalty;
    switch (cfg.method) {
        case SingleLoopMethod::chambolle_pock:
            if (eta1 <= 0.0) eta1 = 1.0 / (2.0 * L_f);
            if (eta2 <= 0.0) eta2 = L_f / (L_A * L_A);
            break;
        case SingleLoopMethod::ogda:
            if (eta1 <= 0.0) eta1 = 1.0 / (4.0 * (L_f + L_A));
            if (eta2 <= 0.0) eta2 = 1.0 / (4.0 * (L_f + L_A));
            break;
        case SingleLoopMethod::linearized_alm:
            if (rho < 0.0) rho = L_f / (L_A * L_A);
            if (eta1 <= 0.0) eta1 = 1.0 / (2.0 * (L_f + rho * L_A * L_A));
            if (eta2 <= 0.0) eta2 = rho;
            break;
    }

    OracleCounters local;
    OracleCounters& tally = hooks.counters ? *hooks.counters : local;
    CompositeProblem cp = with_counters(p, tally);

    SolverReport rep;
    rep.algorithm = name;
    rep.trace = IterateTrace({"k", "dist_to_xstar", "feasibility", "support_size",
                              "grad_f", "apply_A", "apply_At", "prox_h"});
    auto t_start = std::chrono::steady_clock::now();
    const bool know_star = cfg.x_star.size() == p.A.n;

    auto record = [&](long long k, const Vector& x, const Vector& ax) {
        double dist = know_star ? (x - cfg.x_star).norm()
                                : std::numeric_limits<double>::quiet_NaN();
        rep.trace.add_row({static_cast<double>(k), dist, (ax - p.b).norm(),
                           static_cast<double>(detail::exact_support_size(x)),
                           static_cast<double>(tally.grad_f),
                           static_cast<double>(tally.apply_A),
                           static_cast<double>(tally.apply_At),
                           static_cast<double>(tally.prox_h)});
        hooks.observe(x, tally);
    };

    Vector x = x0, lam = lambda0;
    if (cfg.method == SingleLoopMethod::chambolle_pock) {
        Vector ax = cp.A.apply(x);
        for (long long k = 1; k <= cfg.T; ++k) {
            Vector x_next = x - eta1 * (cp.f.gradient(x) + cp.A.adjoint(lam));
            Vector ax_next = cp.A.apply(x_next);
            lam += eta2 * (2.0 * ax_next - ax - p.b);
            x = x_next;
            ax = ax_next;
            detail::check_divergence(x, lam, k, name);
            record(k, x, ax);
        }
    } else if (cfg.method == SingleLoopMethod::ogda) {
        Vector gx = cp.f.gradient(x), ax = cp.A.apply(x);
        Vector gx_prev = gx, ax_prev = ax, lam_prev = lam;
        for (long long k = 1; k <= cfg.T; ++k) {
            Vector x_next =
                x - eta1 * (2.0 * gx - gx_prev + cp.A.adjoint(Vector(2.0 * lam - lam_prev)));
            Vector lam_next = lam + eta2 * (2.0 * ax - ax_prev - p.b);
            gx_prev = gx;
            ax_prev = ax;
            lam_prev = lam;
            x = x_next;
            lam = lam_next;
            gx = cp.f.gradient(x);
            ax = cp.A.apply(x);
            detail::check_divergence(x, lam, k, name);
            record(k, x, ax);
        }
    } else {
        Vector ax = cp.A.apply(x);
        for (long long k = 1; k <= cfg.T; ++k) {
            Vector g = cp.f.gradient(x);
            Vector at = cp.A.adjoint(Vector(lam + rho * (ax - p.b)));
            x -= eta1 * (g + at);
            ax = cp.A.apply(x);
            lam += eta2 * (ax - p.b);
            detail::check_divergence(x, lam, k, name);
            record(k, x, ax);
        }
    }

    rep.x = x;
    rep.lambda = lam;
    rep.tolerance = 0.0;
    rep.counters = tally;
    rep.outer_iterations = cfg.T;
    rep.converged = true;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

} // namespace composolve
