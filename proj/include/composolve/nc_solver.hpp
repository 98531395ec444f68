#pragma once

#include <cmath>
#include <cstdio>
#include <chrono>
#include <string>

#include "errors.hpp"
#include "measures.hpp"
#include "problem.hpp"
#include "report.hpp"
#include "sc_solver.hpp"
#include "trace.hpp"

namespace composolve {

/// Outer proximal-point loop for L_f-smooth, possibly non-convex f. Every
/// subproblem min F(x) + L_f ||x - x_prev||^2 is strongly convex and handed
/// to solve_sc at tolerance delta_k = sqrt(delta_prime / L_f) / (2k).
struct NcConfig {
    long long T = 0;           ///< outer iterations
    double delta_prime = 0.0;  ///< bound on the initial objective gap
    Vector x0;                 ///< empty means zeros(n)
    double delta_scale = 1.0;  ///< multiplies every delta_k; tolerance-sensitivity knob
};

struct NcResult {
    IterateTrace trace;
    long long best_k = 0;
    double best_subopt = kInf;
    Vector best_x;
    SolverReport report;
};

inline NcResult solve_nc(const CompositeProblem& p, const NcConfig& cfg,
                         const RunHooks& hooks = {}) {
    if (cfg.T < 1) throw ParameterError("solve_nc: T must be >= 1");
    if (!(cfg.delta_prime > 0.0))
        throw ParameterError("solve_nc: delta_prime must be positive");
    if (!(cfg.delta_scale > 0.0))
        throw ParameterError("solve_nc: delta_scale must be positive");
    const double L_f = p.f.L_f;
    if (!(L_f > 0.0)) throw ParameterError("solve_nc: L_f must be positive");

    OracleCounters local;
    OracleCounters& tally = hooks.counters ? *hooks.counters : local;
    CompositeProblem counted = with_counters(p, tally);

    NcResult out;
    out.trace = IterateTrace({"k", "delta_k", "subopt_nc", "objective", "grad_f",
                              "apply_A", "apply_At", "prox_h"});
    auto t_start = std::chrono::steady_clock::now();

    Vector x_prev = cfg.x0.size() ? cfg.x0 : Vector(Vector::Zero(p.A.n));
    if (x_prev.size() != p.A.n)
        throw ParameterError("solve_nc: x0 has wrong dimension");

    for (long long k = 1; k <= cfg.T; ++k) {
        const double delta_k =
            cfg.delta_scale * std::sqrt(cfg.delta_prime / L_f) / (2.0 * k);

        SmoothObjective ft;
        ft.dim = p.A.n;
        ft.L_f = 3.0 * L_f;
        ft.mu_f = L_f;
        Vector center = x_prev;
        auto base_value = counted.f.value;
        auto base_grad = counted.f.gradient;
        ft.value = [base_value, center, L_f](const Vector& x) {
            return base_value(x) + L_f * (x - center).squaredNorm();
        };
        ft.gradient = [base_grad, center, L_f](const Vector& x) {
            return Vector(base_grad(x) + 2.0 * L_f * (x - center));
        };
        CompositeProblem sub{ft, counted.h, counted.A, p.b};

        ScConfig sc;
        sc.epsilon = delta_k;
        sc.D = std::max(1.0, 2.0 * x_prev.norm());
        Vector x_k;
        try {
            SolverReport inner = detail::solve_sc_counted(sub, x_prev, sc, tally, hooks);
            x_k = inner.x;
        } catch (const NonConvergenceError& e) {
            char msg[192];
            std::snprintf(msg, sizeof(msg), "solve_nc: outer step %lld: %s", k, e.what());
            throw NonConvergenceError(msg, e.last_iterate, e.residual, out.trace);
        }

        // Measurement happens on the raw problem so the tally stays a count
        // of algorithm work.
        double subopt = subopt_nc(x_k, p).value;
        double feas_val = p.h.value(Vector(p.A.apply(x_k) - p.b));
        double objective = std::isfinite(feas_val) ? p.f.value(x_k) + feas_val : kInf;
        out.trace.add_row({static_cast<double>(k), delta_k, subopt, objective,
                           static_cast<double>(tally.grad_f),
                           static_cast<double>(tally.apply_A),
                           static_cast<double>(tally.apply_At),
                           static_cast<double>(tally.prox_h)});
        hooks.observe(x_k, tally);
        if (subopt < out.best_subopt) {
            out.best_subopt = subopt;
            out.best_k = k;
            out.best_x = x_k;
        }
        x_prev = x_k;
    }

    out.report.algorithm = "nc";
    out.report.x = x_prev;
    out.report.lambda = Vector();
    out.report.tolerance = std::sqrt(5.0 * L_f * cfg.delta_prime / cfg.T);
    out.report.counters = tally;
    out.report.outer_iterations = cfg.T;
    out.report.converged = true;
    out.report.trace = out.trace;
    out.report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return out;
}

} // namespace composolve
