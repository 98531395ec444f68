#pragma once

#include <cmath>
#include <cstdio>
#include <chrono>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "problem.hpp"
#include "report.hpp"
#include "sc_solver.hpp"
#include "trace.hpp"

namespace composolve {

/// Perturbation route for convex f: regularize with (epsilon/2D^2)||x-x0||^2
/// and hand the now strongly convex problem to solve_sc. rho is the surrogate
/// radius the result will be judged against.
struct PerturbConfig {
    double D = 0.0;
    double epsilon = 0.0;
    double rho = 0.0;
};

inline SolverReport solve_c_perturb(const CompositeProblem& p, const Vector& x0,
                                    const PerturbConfig& cfg, const RunHooks& hooks = {}) {
    if (!(cfg.D > 0.0) || !(cfg.epsilon > 0.0) || !(cfg.rho > 0.0))
        throw ParameterError("solve_c_perturb: D, epsilon, rho must be positive");
    OracleCounters local;
    OracleCounters& tally = hooks.counters ? *hooks.counters : local;
    CompositeProblem counted = with_counters(p, tally);

    const double L_f = p.f.L_f, L_A = p.A.L_A;
    const double mu = cfg.epsilon / (cfg.D * cfg.D); // added curvature
    SmoothObjective ft;
    ft.dim = p.A.n;
    ft.L_f = L_f + mu;
    ft.mu_f = mu;
    Vector center = x0;
    auto base_value = counted.f.value;
    auto base_grad = counted.f.gradient;
    ft.value = [base_value, center, mu](const Vector& x) {
        return base_value(x) + 0.5 * mu * (x - center).squaredNorm();
    };
    ft.gradient = [base_grad, center, mu](const Vector& x) {
        return Vector(base_grad(x) + mu * (x - center));
    };
    CompositeProblem sub{ft, counted.h, counted.A, p.b};

    const double C_rho = counted.f.gradient(x0).norm() + L_f * cfg.D + cfg.rho * L_A;
    double delta = cfg.epsilon / (3.0 * C_rho);
    if (L_f > 0.0) delta = std::min(delta, std::sqrt(cfg.epsilon / (3.0 * L_f)));

    ScConfig sc;
    sc.epsilon = delta;
    sc.D = cfg.D;
    SolverReport rep = detail::solve_sc_counted(sub, x0, sc, tally, hooks);
    rep.algorithm = "c-perturb";
    rep.tolerance = cfg.epsilon;
    rep.counters = tally;
    return rep;
}

/// Fixed point of the scalar growth inequality that bounds how far the
/// accelerated proximal-point iterates can wander. The right-hand side grows
/// like omega^{1/4}, so the crossing with the identity is unique; it is
/// bracketed by doubling and refined by bisection to 1e-10 relative.
inline double compute_varpi(double L_f, double L_A, double sigma_min_nz, double D) {
    if (!(L_f > 0.0) || !(L_A > 0.0) || !(sigma_min_nz > 0.0) || !(D > 0.0))
        throw ParameterError("compute_varpi: all parameters must be positive");
    const double s2 = sigma_min_nz * sigma_min_nz;
    const double tau = 0.5 * L_f * D * D;
    const double C0 = 1.5 * D;
    const double C1 = 4.0 * L_A / s2;
    const double C2 = (6.0 * L_f * D * D + 8.0 * (4.0 * L_f + L_A) / s2) / (2.0 * L_f);
    const double D0 = C0 + C1 + std::sqrt(C2) + std::sqrt(C0 * C1);
    const double D1 = 4.0 * L_A / s2;

    auto rhs = [&](double w) {
        double s = (L_f * L_A * w + L_f * (L_A * D + 1.0) + L_A) / s2;
        return std::sqrt(2.0 / L_f) *
               (std::sqrt(tau) +
                std::sqrt(2.0 / L_f + s +
                          std::sqrt(2.0 / L_f) * (std::sqrt(tau) + std::sqrt(s))));
    };

    double lo = 0.0;
    double hi = std::max(1.0, 2.0 * rhs(0.0));
    int doublings = 0;
    while (rhs(hi) > hi) {
        hi *= 2.0;
        if (++doublings > 200) {
            char msg[192];
            std::snprintf(msg, sizeof(msg),
                          "compute_varpi: no sign change up to omega=%.3e "
                          "(rhs=%.3e); growth inequality never crosses",
                          hi, rhs(hi));
            throw RootBracketError(msg);
        }
    }
    while (hi - lo > 1e-10 * hi) {
        double mid = 0.5 * (lo + hi);
        if (rhs(mid) > mid)
            lo = mid;
        else
            hi = mid;
    }
    const double omega1 = hi;
    const double head = std::sqrt(D1) + std::sqrt(D1 + 4.0 * D0);
    return std::max(head * head / 4.0, omega1);
}

/// Accelerated inexact proximal-point for convex f over {Ax = b}. Inner
/// subproblems min f(x) + (L_f/2)||x - y_k||^2 s.t. Ax = b are driven through
/// solve_sc until the computable residuals
///   || grad f(x_k) + L_f (x_k - y_k) + A^T lambda_k || <= sqrt(L_f/2) eps_k / t_k
///   || A x_k - b || <= gamma_k
/// hold, halving the inner distance tolerance on verification failure.
struct AppaConfig {
    long long T = 0;
    double D = 0.0;
    double varpi = 0.0; ///< 0 computes it from the problem bounds
    /// Optional schedule overrides; called as (k, t_k). Defaults sit at the
    /// largest admissible caps.
    std::function<double(long long, double)> eps_k;
    std::function<double(long long, double)> gamma_k;
    double final_gamma = 0.0; ///< optional extra tightening of the last step
    Vector lambda_star;       ///< optional ground truth, enables the v_k column
    double f_star = std::numeric_limits<double>::quiet_NaN();
};

inline double appa_t_next(double t) { return 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t)); }

inline SolverReport solve_c_appa(const CompositeProblem& p, const Vector& x0,
                                 const AppaConfig& cfg, const RunHooks& hooks = {}) {
    if (p.h.kind != ProxKind::indicator_zero)
        throw UnsupportedProxError(prox_kind_name(p.h.kind),
            "solve_c_appa: only linear equality constraints (indicator_zero) "
            "are supported");
    if (cfg.T < 1 || !(cfg.D > 0.0))
        throw ParameterError("solve_c_appa: need T >= 1 and D > 0");

    OracleCounters local;
    OracleCounters& tally = hooks.counters ? *hooks.counters : local;
    CompositeProblem counted = with_counters(p, tally);

    const double L_f = p.f.L_f, L_A = p.A.L_A;
    const double sigma = p.A.sigma_min > 0.0 ? p.A.sigma_min : p.A.sigma_min_nz;
    if (!(sigma > 0.0))
        throw ParameterError("solve_c_appa: A needs a positive sigma_min or sigma_min_nz");
    const double varpi =
        cfg.varpi > 0.0 ? cfg.varpi : compute_varpi(L_f, L_A, sigma, cfg.D);
    const double gamma_cap = std::min(
        sigma * sigma * L_f * cfg.D * cfg.D /
            (8.0 * (L_f * L_A * (varpi + cfg.D) + 4.0 * L_f + L_A)),
        1.0);

    SolverReport rep;
    rep.algorithm = "c-appa";
    rep.trace = IterateTrace({"k", "t_k", "eps_k", "gamma_k", "res_grad", "res_feas",
                              "v_k", "grad_f", "apply_A", "apply_At", "prox_h"});
    auto t_start = std::chrono::steady_clock::now();

    Vector x_prev = x0; // x_{k-1}
    Vector y = x0;      // y_k
    Vector lambda_last = Vector::Zero(p.A.m);
    double t = 1.0;     // t_k
    double gamma_last = 0.0;

    for (long long k = 1; k <= cfg.T; ++k) {
        double eps_k = cfg.eps_k
            ? cfg.eps_k(k, t)
            : std::min(std::sqrt(L_f) * cfg.D /
                           (2.0 * std::numbers::sqrt2 * static_cast<double>(k) * k),
                       std::sqrt(2.0 / L_f));
        double gamma_k = cfg.gamma_k
            ? cfg.gamma_k(k, t)
            : gamma_cap / (t * t * (k + 1.0) * (k + 1.0) * (k + 1.0));
        if (k == cfg.T && cfg.final_gamma > 0.0)
            gamma_k = std::min(gamma_k, cfg.final_gamma);

        const double r_grad = std::sqrt(L_f / 2.0) * eps_k / t;
        const double r_feas = gamma_k;
        double eps_tilde = std::min(r_grad, r_feas) / (L_A + 2.0 * L_f);

        SmoothObjective ft;
        ft.dim = p.A.n;
        ft.L_f = 2.0 * L_f;
        ft.mu_f = L_f;
        Vector center = y;
        auto base_value = counted.f.value;
        auto base_grad = counted.f.gradient;
        ft.value = [base_value, center, L_f](const Vector& x) {
            return base_value(x) + 0.5 * L_f * (x - center).squaredNorm();
        };
        ft.gradient = [base_grad, center, L_f](const Vector& x) {
            return Vector(base_grad(x) + L_f * (x - center));
        };
        CompositeProblem sub{ft, counted.h, counted.A, p.b};

        Vector warm = x_prev, x_k, lam_k, dvec, zeta;
        bool accepted = false;
        for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
            ScConfig sc;
            sc.epsilon = eps_tilde;
            SolverReport inner = detail::solve_sc_counted(sub, warm, sc, tally, hooks);
            x_k = inner.x;
            lam_k = inner.lambda;
            dvec = counted.f.gradient(x_k) + L_f * (x_k - y) + counted.A.adjoint(lam_k);
            zeta = counted.A.apply(x_k) - p.b;
            if (dvec.norm() <= r_grad && zeta.norm() <= r_feas) {
                accepted = true;
            } else {
                eps_tilde *= 0.5;
                warm = x_k;
            }
        }
        if (!accepted) {
            char msg[192];
            std::snprintf(msg, sizeof(msg),
                          "solve_c_appa: outer step %lld: residual verification kept "
                          "failing (res_grad=%.3e vs %.3e, res_feas=%.3e vs %.3e)",
                          k, dvec.norm(), r_grad, zeta.norm(), r_feas);
            throw NonConvergenceError(msg, x_k,
                                      std::max(dvec.norm() / r_grad, zeta.norm() / r_feas),
                                      rep.trace);
        }

        double v_k = std::numeric_limits<double>::quiet_NaN();
        if (cfg.lambda_star.size() == p.A.m && std::isfinite(cfg.f_star))
            v_k = p.f.value(x_k) - cfg.f_star + cfg.lambda_star.dot(zeta);

        rep.trace.add_row({static_cast<double>(k), t, eps_k, gamma_k, dvec.norm(),
                           zeta.norm(), v_k, static_cast<double>(tally.grad_f),
                           static_cast<double>(tally.apply_A),
                           static_cast<double>(tally.apply_At),
                           static_cast<double>(tally.prox_h)});
        hooks.observe(x_k, tally);

        double t_next = appa_t_next(t);
        y = x_k + ((t - 1.0) / t_next) * (x_k - x_prev);
        x_prev = x_k;
        t = t_next;
        lambda_last = lam_k;
        gamma_last = gamma_k;
    }

    rep.x = x_prev;
    rep.lambda = lambda_last;
    rep.tolerance = gamma_last;
    rep.counters = tally;
    rep.outer_iterations = cfg.T;
    rep.converged = true;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

} // namespace composolve
