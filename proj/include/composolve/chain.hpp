#pragma once

#include <cmath>
#include <numbers>
#include <utility>

#include "errors.hpp"
#include "problem.hpp"
#include "types.hpp"

namespace composolve {

/// In-place Thomas elimination for a tridiagonal system. lower/upper have
/// length n-1. No pivoting: every system solved here is diagonally dominant.
inline Vector solve_tridiagonal(Vector lower, Vector diag, Vector upper, Vector rhs) {
    const Index n = diag.size();
    for (Index i = 1; i < n; ++i) {
        double w = lower[i - 1] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    Vector x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (Index i = n - 2; i >= 0; --i)
        x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    return x;
}

/// Block difference operator on 2N blocks of size d:
///   (Ax)_i = x[i] - x[i+1],  i = 1..2N-1.
/// Its Gram A A^T is tridiag(-1,2,-1) acting per coordinate, eigenvalues
/// 2 + 2cos(pi i / 2N), so L_A = 2 is certified and
/// sigma_min = sqrt(2 - 2cos(pi/2N)). gram_solve runs d independent Thomas
/// solves, O(Nd) total.
inline LinearMap build_chain_matrix(Index N, Index d) {
    if (N < 1 || d < 1) throw ParameterError("build_chain_matrix: need N, d >= 1");
    LinearMap A;
    A.n = 2 * N * d;
    A.m = (2 * N - 1) * d;
    A.L_A = 2.0;
    A.sigma_min = std::sqrt(2.0 + 2.0 * std::cos(std::numbers::pi *
                      static_cast<double>(2 * N - 1) / static_cast<double>(2 * N)));
    A.sigma_min_nz = A.sigma_min;
    A.apply = [N, d](const Vector& x) {
        Vector y((2 * N - 1) * d);
        for (Index i = 0; i < 2 * N - 1; ++i)
            y.segment(i * d, d) = x.segment(i * d, d) - x.segment((i + 1) * d, d);
        return y;
    };
    A.adjoint = [N, d](const Vector& y) {
        Vector x = Vector::Zero(2 * N * d);
        x.segment(0, d) = y.segment(0, d);
        for (Index i = 1; i < 2 * N - 1; ++i)
            x.segment(i * d, d) = y.segment(i * d, d) - y.segment((i - 1) * d, d);
        x.segment((2 * N - 1) * d, d) = -y.segment((2 * N - 2) * d, d);
        return x;
    };
    A.gram_solve = [N, d](const Vector& r) {
        const Index rows = 2 * N - 1;
        Vector y(rows * d);
        Vector lower = Vector::Constant(rows - 1, -1.0);
        Vector upper = Vector::Constant(rows - 1, -1.0);
        Vector dia = Vector::Constant(rows, 2.0);
        Vector rhs(rows);
        for (Index j = 0; j < d; ++j) {
            for (Index i = 0; i < rows; ++i) rhs[i] = r[i * d + j];
            Vector sol = solve_tridiagonal(lower, dia, upper, rhs);
            for (Index i = 0; i < rows; ++i) y[i * d + j] = sol[i];
        }
        return y;
    };
    return A;
}

/// Chain matrix with the first block row appended again at the bottom, so A
/// loses full row rank while the feasible set {Ax = 0} is untouched. The
/// duplicate only adds energy: A'^T A' = A^T A + R^T R with the same
/// nullspace, which certifies sigma_min_nz >= old sigma_min and
/// ||A'||^2 <= ||A||^2 + ||R||^2 = 4 + 2.
inline LinearMap build_chain_matrix_duplicate_row(Index N, Index d) {
    LinearMap base = build_chain_matrix(N, d);
    LinearMap A;
    A.n = base.n;
    A.m = base.m + d;
    A.L_A = std::sqrt(6.0);
    A.sigma_min = 0.0;
    A.sigma_min_nz = base.sigma_min;
    A.apply = [N, d, inner = base.apply](const Vector& x) {
        Vector y((2 * N) * d);
        y.head((2 * N - 1) * d) = inner(x);
        y.tail(d) = x.segment(0, d) - x.segment(d, d);
        return y;
    };
    A.adjoint = [N, d, inner = base.adjoint](const Vector& y) {
        Vector x = inner(y.head((2 * N - 1) * d));
        x.segment(0, d) += y.tail(d);
        x.segment(d, d) -= y.tail(d);
        return x;
    };
    return A;
}

/// Strongly convex chain objective. Per block pair (u, v) in R^d x R^d:
///   G(u,v) = c * G0(u,v) + (mu_f/2)(||u||^2 + ||v||^2),   c = (L_f - mu_f)/4,
///   G0(u,v) = (alpha - u_1)^2 + sum_{i=2}^{d} (v_{i-1} - u_i)^2,
/// and f0(x) = sum_{i=1}^{N} G(x[i], x[N+i]) over 2N stacked blocks. The
/// minimizer is the same vector in every block with a closed form driven by
/// q = (sqrt(kappa_f)-1)/(sqrt(kappa_f)+1).
struct ScChainInstance {
    Index N = 0, d = 0;
    double L_f = 0.0, mu_f = 0.0, alpha = 0.0;

    double q() const {
        double rk = std::sqrt(L_f / mu_f);
        return (rk - 1.0) / (rk + 1.0);
    }
    double beta() const { return 4.0 * mu_f / (L_f - mu_f); }

    /// Optimal per-block vector: v*_i = alpha (q^i + q^{2d+1-i}) / (1 + q^{2d+1}).
    Vector vstar() const {
        Vector v(d);
        double qq = q();
        double denom = 1.0 + std::pow(qq, 2.0 * d + 1.0);
        for (Index i = 1; i <= d; ++i)
            v[i - 1] = alpha *
                (std::pow(qq, static_cast<double>(i)) +
                 std::pow(qq, static_cast<double>(2 * d + 1 - i))) / denom;
        return v;
    }

    Vector closed_form_optimum() const {
        Vector vs = vstar();
        Vector x(2 * N * d);
        for (Index i = 0; i < 2 * N; ++i) x.segment(i * d, d) = vs;
        return x;
    }

    SmoothObjective objective() const {
        SmoothObjective f;
        f.dim = 2 * N * d;
        f.L_f = L_f;
        f.mu_f = mu_f;
        const Index N_ = N, d_ = d;
        const double c = (L_f - mu_f) / 4.0, mu = mu_f, a = alpha;
        f.value = [N_, d_, c, mu, a](const Vector& x) {
            double s = 0.0;
            for (Index p = 0; p < N_; ++p) {
                auto u = x.segment(p * d_, d_);
                auto v = x.segment((N_ + p) * d_, d_);
                double g0 = (a - u[0]) * (a - u[0]);
                for (Index i = 1; i < d_; ++i)
                    g0 += (v[i - 1] - u[i]) * (v[i - 1] - u[i]);
                s += c * g0 + 0.5 * mu * (u.squaredNorm() + v.squaredNorm());
            }
            return s;
        };
        f.gradient = [N_, d_, c, mu, a](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            for (Index p = 0; p < N_; ++p) {
                auto u = x.segment(p * d_, d_);
                auto v = x.segment((N_ + p) * d_, d_);
                auto gu = g.segment(p * d_, d_);
                auto gv = g.segment((N_ + p) * d_, d_);
                gu[0] = -2.0 * c * (a - u[0]) + mu * u[0];
                for (Index i = 1; i < d_; ++i) {
                    gu[i] = -2.0 * c * (v[i - 1] - u[i]) + mu * u[i];
                    gv[i - 1] = 2.0 * c * (v[i - 1] - u[i]) + mu * v[i - 1];
                }
                gv[d_ - 1] = mu * v[d_ - 1];
            }
            return g;
        };
        return f;
    }
};

/// Non-convex chain objective built from the bump pair
///   Psi(x) = 0 for x <= 1/2, exp(1 - (2x-1)^{-2}) otherwise,
///   Phi(x) = sqrt(e) * integral of exp(-t^2/2) up to x,
/// scaled so the whole objective is L_f-smooth:
///   G(u,v) = (L_f alpha^2 / l0) G0(u/alpha, v/alpha),  l0 = 600000.
struct NcChainInstance {
    Index N = 0, d = 0;
    double L_f = 0.0, alpha = 0.0;

    static constexpr double l0 = 600000.0;

    static double psi(double x) {
        if (x <= 0.5) return 0.0;
        double t = 2.0 * x - 1.0;
        return std::exp(1.0 - 1.0 / (t * t));
    }
    static double psi_prime(double x) {
        if (x <= 0.5) return 0.0;
        double t = 2.0 * x - 1.0;
        return psi(x) * 4.0 / (t * t * t);
    }
    static double phi(double x) {
        return std::sqrt(std::numbers::e * std::numbers::pi / 2.0) *
               (1.0 + std::erf(x / std::numbers::sqrt2));
    }
    static double phi_prime(double x) {
        return std::sqrt(std::numbers::e) * std::exp(-0.5 * x * x);
    }

    ///   G0(u,v) = -Psi(1) Phi(u_1)
    ///             + sum_{i=2}^{d} [ Psi(-v_{i-1}) Phi(-u_i) - Psi(v_{i-1}) Phi(u_i) ].
    static double g0_value(const Eigen::Ref<const Vector>& u,
                           const Eigen::Ref<const Vector>& v) {
        double s = -psi(1.0) * phi(u[0]);
        for (Index i = 1; i < u.size(); ++i)
            s += psi(-v[i - 1]) * phi(-u[i]) - psi(v[i - 1]) * phi(u[i]);
        return s;
    }

    /// Gradient of G0. Zeros propagate exactly: psi and psi_prime vanish
    /// identically on (-inf, 1/2], so untouched coordinates stay 0.0.
    static void g0_gradient(const Eigen::Ref<const Vector>& u,
                            const Eigen::Ref<const Vector>& v,
                            Eigen::Ref<Vector> gu, Eigen::Ref<Vector> gv) {
        const Index d = u.size();
        gu[0] = -psi(1.0) * phi_prime(u[0]);
        for (Index i = 1; i < d; ++i)
            gu[i] = -psi(-v[i - 1]) * phi_prime(-u[i]) - psi(v[i - 1]) * phi_prime(u[i]);
        for (Index i = 0; i + 1 < d; ++i)
            gv[i] = -psi_prime(-v[i]) * phi(-u[i + 1]) - psi_prime(v[i]) * phi(u[i + 1]);
        gv[d - 1] = 0.0;
    }

    SmoothObjective objective() const {
        SmoothObjective f;
        f.dim = 2 * N * d;
        f.L_f = L_f;
        f.mu_f = 0.0;
        const Index N_ = N, d_ = d;
        const double a = alpha, scale = L_f * alpha * alpha / l0;
        f.value = [N_, d_, a, scale](const Vector& x) {
            double s = 0.0;
            for (Index p = 0; p < N_; ++p) {
                Vector u = x.segment(p * d_, d_) / a;
                Vector v = x.segment((N_ + p) * d_, d_) / a;
                s += scale * g0_value(u, v);
            }
            return s;
        };
        f.gradient = [N_, d_, a, scale](const Vector& x) {
            Vector g = Vector::Zero(x.size());
            Vector gu(d_), gv(d_);
            for (Index p = 0; p < N_; ++p) {
                Vector u = x.segment(p * d_, d_) / a;
                Vector v = x.segment((N_ + p) * d_, d_) / a;
                g0_gradient(u, v, gu, gv);
                g.segment(p * d_, d_) = (scale / a) * gu;
                g.segment((N_ + p) * d_, d_) = (scale / a) * gv;
            }
            return g;
        };
        return f;
    }

    /// Initial-gap certificate: F(0) - inf F <= 12 N d L_f alpha^2 / l0.
    double initial_gap_bound() const { return 12.0 * N * d * L_f * alpha * alpha / l0; }

    /// Any point whose last v-coordinate is zero has gradient norm at least
    /// this along the diagonal restriction; the stationarity floor.
    double stationarity_floor() const { return L_f * alpha / l0; }
};

namespace detail {

inline Index chain_block_count(double kappa_A) {
    return static_cast<Index>(std::floor((kappa_A + 1.0) / 2.0));
}

inline Index chain_depth_index(Index k_budget, Index N) {
    return (k_budget - 2) / (N + 1) + 1; // K in the sizing recipes
}

} // namespace detail

/// Worst-case strongly convex instance sized for a k_budget-round oracle
/// budget at condition targets kappa_A (via N) and L_f/mu_f. h is the zero
/// indicator, b = 0, the intended start is x0 = 0, and alpha is rescaled so
/// ||x0 - x*|| = dist.
inline std::pair<ScChainInstance, CompositeProblem>
make_sc_instance(double L_f, double mu_f, double kappa_A, Index k_budget, double dist) {
    if (!(L_f > mu_f) || !(mu_f > 0.0))
        throw ParameterError("make_sc_instance: need L_f > mu_f > 0");
    if (!(kappa_A >= 1.0)) throw ParameterError("make_sc_instance: need kappa_A >= 1");
    if (!(dist > 0.0)) throw ParameterError("make_sc_instance: need dist > 0");
    Index N = detail::chain_block_count(kappa_A);
    if (k_budget < N || k_budget < 2)
        throw ParameterError("make_sc_instance: k_budget too small for this kappa_A");
    Index K = detail::chain_depth_index(k_budget, N);
    ScChainInstance inst{N, 2 * K, L_f, mu_f, 1.0};
    double norm_at_unit = std::sqrt(2.0 * N) * inst.vstar().norm();
    inst.alpha = dist / norm_at_unit;

    CompositeProblem p;
    p.f = inst.objective();
    p.h = make_indicator_zero();
    p.A = build_chain_matrix(N, inst.d);
    p.b = Vector::Zero(p.A.m);
    return {inst, p};
}

/// Worst-case non-convex instance: alpha = sqrt(l0 Delta / (12 N d L_f))
/// makes the initial gap at x0 = 0 at most Delta.
inline std::pair<NcChainInstance, CompositeProblem>
make_nc_instance(double L_f, double Delta, double kappa_A, Index k_budget) {
    if (!(L_f > 0.0) || !(Delta > 0.0))
        throw ParameterError("make_nc_instance: need L_f, Delta > 0");
    if (!(kappa_A >= 1.0)) throw ParameterError("make_nc_instance: need kappa_A >= 1");
    if (static_cast<double>(k_budget) < kappa_A || k_budget < 2)
        throw ParameterError("make_nc_instance: k_budget too small for this kappa_A");
    Index N = detail::chain_block_count(kappa_A);
    Index K = detail::chain_depth_index(k_budget, N);
    NcChainInstance inst{N, K + 2, L_f, 0.0};
    inst.alpha = std::sqrt(NcChainInstance::l0 * Delta /
                           (12.0 * N * inst.d * L_f));

    CompositeProblem p;
    p.f = inst.objective();
    p.h = make_indicator_zero();
    p.A = build_chain_matrix(N, inst.d);
    p.b = Vector::Zero(p.A.m);
    return {inst, p};
}

/// Convex reduction: the strongly convex chain at mu_f = L_f/(K+1)^2 handed
/// out with declared mu_f = 0, so convex-path solvers cannot lean on the
/// hidden modulus. The instance keeps the true value for certificates.
inline std::pair<ScChainInstance, CompositeProblem>
make_c_instance(double L_f, double kappa_A, Index k_budget, double dist) {
    Index N = detail::chain_block_count(kappa_A);
    if (k_budget < N || k_budget < 2)
        throw ParameterError("make_c_instance: k_budget too small for this kappa_A");
    Index K = detail::chain_depth_index(k_budget, N);
    double mu_true = L_f / ((K + 1.0) * (K + 1.0));
    auto [inst, p] = make_sc_instance(L_f, mu_true, kappa_A, k_budget, dist);
    p.f.mu_f = 0.0;
    return {inst, p};
}

} // namespace composolve
