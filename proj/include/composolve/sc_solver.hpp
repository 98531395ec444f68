#pragma once

#include <cmath>
#include <cstdio>
#include <chrono>
#include <string>

#include "agd.hpp"
#include "errors.hpp"
#include "problem.hpp"
#include "prox.hpp"
#include "report.hpp"
#include "trace.hpp"

namespace composolve {

/// Inexact dual proximal-point solver for strongly convex f. Each outer step
/// solves the smooth primal model Psi_k by AGD to a shrinking distance
/// tolerance delta_k = (1-rho)^{k/2} D, then takes the dual prox step.
struct ScConfig {
    double ell = 0.0;     ///< dual prox weight; 0 picks mu_Phi (the optimal choice)
    double D = 0.0;       ///< bound on ||x0 - x*||; 0 picks max(1, 10 ||x0||)
    double epsilon = 0.0; ///< target ||x_T - x*||
    Vector lambda0;       ///< empty means zeros(m)
    long long outer_cap = 0; ///< 0 = run the full prescribed count
    bool kkt_early_exit = false; ///< optional stop on a computable KKT residual
    double kkt_tolerance = 0.0;
};

/// lambda*_k(x) = prox_{h*/ell}(lambda_prev + (Ax - b)/ell), the maximizer of
/// the dual regularized model at x.
inline Vector dual_reg_multiplier(const CompositeProblem& p, const Vector& lambda_prev,
                                  double ell, const Vector& x) {
    if (!(ell > 0.0)) throw ParameterError("dual_reg_multiplier: ell must be positive");
    Vector z = p.A.apply(x);
    return prox_conjugate_scaled(p.h, ell, Vector(lambda_prev + (z - p.b) / ell));
}

/// grad Psi_k(x) = grad f(x) + A^T lambda*_k(x). Costs exactly one call to
/// each of the four oracles. Psi_k is (L_f + L_A^2/ell)-smooth and
/// mu_f-strongly convex.
inline Vector psi_k_gradient(const CompositeProblem& p, const Vector& lambda_prev,
                             double ell, const Vector& x) {
    Vector z = p.A.apply(x);
    Vector lam = prox_conjugate_scaled(p.h, ell, Vector(lambda_prev + (z - p.b) / ell));
    return p.f.gradient(x) + p.A.adjoint(lam);
}

namespace detail {

inline bool is_zero_vector(const Vector& v) {
    for (Index i = 0; i < v.size(); ++i)
        if (v[i] != 0.0) return false;
    return true;
}

/// Picks the singular-value floor the dual strong concavity rests on. Full
/// row rank uses sigma_min. Without it the dual is only strongly concave on
/// range(A), which the iteration never leaves when h is the zero indicator
/// and lambda0 = 0; that path uses sigma_min_nz.
inline double applicable_sigma(const CompositeProblem& p, const Vector& lambda0) {
    if (p.A.sigma_min > 0.0) return p.A.sigma_min;
    if (p.A.sigma_min_nz > 0.0 && p.h.kind == ProxKind::indicator_zero &&
        is_zero_vector(lambda0))
        return p.A.sigma_min_nz;
    throw ParameterError(
        "solve_sc: A has no certified sigma_min; the rank-deficient path needs "
        "h = indicator_zero, lambda0 = 0, and a positive sigma_min_nz");
}

/// Core loop over a problem whose oracles already feed `tally`. Nested
/// solvers call this directly so counts aggregate once.
inline SolverReport solve_sc_counted(const CompositeProblem& p, const Vector& x0,
                                     const ScConfig& cfg, OracleCounters& tally,
                                     const RunHooks& hooks) {
    if (!(cfg.epsilon > 0.0)) throw ParameterError("solve_sc: epsilon must be positive");
    if (!(p.f.mu_f > 0.0))
        throw NotStronglyConvexError("solve_sc: problem declares mu_f = 0; "
                                     "use the convex-path solvers instead");
    Vector lambda_prev = cfg.lambda0.size() ? cfg.lambda0 : Vector(Vector::Zero(p.A.m));
    if (lambda_prev.size() != p.A.m)
        throw ParameterError("solve_sc: lambda0 has wrong dimension");

    const double L_f = p.f.L_f, mu_f = p.f.mu_f, L_A = p.A.L_A;
    const double sigma = applicable_sigma(p, lambda_prev);
    const double mu_Phi = sigma * sigma / L_f;
    const double ell = cfg.ell > 0.0 ? cfg.ell : mu_Phi;
    if (ell < mu_Phi * (1.0 - 1e-12))
        throw ParameterError("solve_sc: ell must be at least mu_Phi = sigma^2/L_f");
    const double rho = mu_Phi / (12.0 * ell);
    const double D = cfg.D > 0.0 ? cfg.D : std::max(1.0, 10.0 * x0.norm());
    const double kappa_f = L_f / mu_f, kappa_A = L_A / sigma;
    const double L_psi = L_f + L_A * L_A / ell;

    long long T = static_cast<long long>(std::ceil(
        (12.0 * ell / mu_Phi) * std::log(100.0 * kappa_f * kappa_A * D / cfg.epsilon)));
    if (T < 1) T = 1;

    SolverReport rep;
    rep.algorithm = "sc";
    rep.tolerance = cfg.epsilon;
    rep.trace = IterateTrace({"k", "delta_k", "inner_iters", "feasibility",
                              "grad_f", "apply_A", "apply_At", "prox_h"});

    auto t_start = std::chrono::steady_clock::now();
    Vector x = x0;
    Vector lambda_prev2 = lambda_prev;
    double delta_prev = D;
    const double M_guess = 10.0 * L_A * D / mu_Phi;
    long long k = 0;
    while (k < T) {
        ++k;
        if (cfg.outer_cap > 0 && k > cfg.outer_cap) {
            char msg[160];
            std::snprintf(msg, sizeof(msg),
                          "solve_sc: prescribed outer count %lld exceeds outer_cap %lld",
                          T, cfg.outer_cap);
            throw NonConvergenceError(msg, x, delta_prev, rep.trace);
        }
        const double delta_k = std::pow(1.0 - rho, 0.5 * k) * D;
        const double R_guess =
            (k == 1) ? 2.0 * D + 3.0 * (L_A / mu_f) * M_guess
                     : (L_A / mu_f) * (lambda_prev - lambda_prev2).norm() + delta_prev;

        AgdSpec spec;
        spec.L = L_psi;
        spec.mu = mu_f;
        spec.delta = delta_k;
        spec.max_iters =
            agd_default_max_iters(L_psi, mu_f, std::max(R_guess, delta_k), delta_k);
        auto grad = [&](const Vector& xx) {
            return psi_k_gradient(p, lambda_prev, ell, xx);
        };
        auto observer = [&](const Vector& y) { hooks.observe(y, tally); };
        AgdResult inner = agd(grad, x, spec, observer);
        x = inner.y;

        Vector z = p.A.apply(x);
        Vector lambda_k =
            prox_conjugate_scaled(p.h, ell, Vector(lambda_prev + (z - p.b) / ell));
        double feas = (z - p.b).norm();
        rep.trace.add_row({static_cast<double>(k), delta_k,
                           static_cast<double>(inner.iters), feas,
                           static_cast<double>(tally.grad_f),
                           static_cast<double>(tally.apply_A),
                           static_cast<double>(tally.apply_At),
                           static_cast<double>(tally.prox_h)});
        hooks.observe(x, tally);

        lambda_prev2 = lambda_prev;
        lambda_prev = lambda_k;
        delta_prev = delta_k;

        if (cfg.kkt_early_exit && cfg.kkt_tolerance > 0.0) {
            Vector station = p.f.gradient(x) + p.A.adjoint(lambda_k);
            Vector zb = z - p.b;
            Vector hres = zb - p.h.prox(1.0, Vector(zb + lambda_k));
            if (station.norm() + hres.norm() <= cfg.kkt_tolerance) break;
        }
    }
    rep.x = x;
    rep.lambda = lambda_prev;
    rep.outer_iterations = k;
    rep.converged = true;
    rep.counters = tally;
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rep;
}

} // namespace detail

/// Runs the prescribed outer count T = ceil((12 ell/mu_Phi) log(100 kappa_f
/// kappa_A D / epsilon)) unless outer_cap cuts it short (which raises
/// NonConvergenceError carrying the partial trace).
inline SolverReport solve_sc(const CompositeProblem& p, const Vector& x0,
                             const ScConfig& cfg, const RunHooks& hooks = {}) {
    OracleCounters local;
    OracleCounters& tally = hooks.counters ? *hooks.counters : local;
    CompositeProblem counted = with_counters(p, tally);
    SolverReport rep = detail::solve_sc_counted(counted, x0, cfg, tally, hooks);
    rep.counters = tally;
    return rep;
}

} // namespace composolve
