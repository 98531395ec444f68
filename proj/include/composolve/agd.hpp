#pragma once

#include <cmath>
#include <cstdio>
#include <functional>

#include "errors.hpp"
#include "types.hpp"

namespace composolve {

/// Accelerated gradient descent on an L-smooth, mu-strongly-convex function,
/// terminated on the gradient norm: ||grad(y)|| <= mu * delta guarantees
/// ||y - y*|| <= delta.
struct AgdSpec {
    double L = 0.0;
    double mu = 0.0;
    double delta = 0.0;
    long long max_iters = 0;
};

/// Safety cap sized from the linear rate: ceil(2 sqrt(kappa) log(2 kappa R / delta))
/// plus slack. R_guess is the caller's bound on ||y0 - y*||; pass generously
/// when unknown, it only enters a logarithm.
inline long long agd_default_max_iters(double L, double mu, double R_guess,
                                       double delta) {
    double kappa = L / mu;
    double lg = std::log(2.0 * kappa * R_guess / delta);
    if (!(lg > 0.0)) lg = 0.0;
    return static_cast<long long>(std::ceil(2.0 * std::sqrt(kappa) * lg)) + 64;
}

struct AgdResult {
    Vector y;
    long long iters = 0;
};

/// Constant-momentum AGD:
///   y~_{k+1} = y_k + theta (y_k - y_{k-1}),  theta = (sqrt(kappa)-1)/(sqrt(kappa)+1)
///   y_{k+1}  = y~_{k+1} - grad(y~_{k+1}) / L
/// with y_{-1} = y_0, exit test on ||grad(y_k)|| checked at y0 first and then
/// after each full step (two gradient calls per step).
inline AgdResult agd(const std::function<Vector(const Vector&)>& grad,
                     const Vector& y0, const AgdSpec& spec,
                     const std::function<void(const Vector&)>& observer = nullptr) {
    if (!(spec.mu > 0.0) || !(spec.L >= spec.mu))
        throw ParameterError("agd: need 0 < mu <= L");
    if (!(spec.delta > 0.0)) throw ParameterError("agd: delta must be positive");
    if (spec.max_iters < 1) throw ParameterError("agd: max_iters must be >= 1");

    const double exit_norm = spec.mu * spec.delta;
    if (grad(y0).norm() <= exit_norm) return {y0, 0};

    const double rk = std::sqrt(spec.L / spec.mu);
    const double theta = (rk - 1.0) / (rk + 1.0);
    Vector y_prev = y0, y = y0;
    double res = 0.0;
    for (long long t = 1; t <= spec.max_iters; ++t) {
        Vector y_tilde = y + theta * (y - y_prev);
        Vector y_next = y_tilde - grad(y_tilde) / spec.L;
        y_prev = y;
        y = y_next;
        if (observer) observer(y);
        res = grad(y).norm();
        if (res <= exit_norm) return {y, t};
    }
    char msg[128];
    std::snprintf(msg, sizeof(msg),
                  "agd: gradient norm %.3e above exit level %.3e after %lld iterations",
                  res, exit_norm, spec.max_iters);
    throw NonConvergenceError(msg, y, res);
}

} // namespace composolve
