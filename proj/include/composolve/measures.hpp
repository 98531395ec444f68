#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "problem.hpp"
#include "prox.hpp"
#include "sc_solver.hpp"
#include "types.hpp"

namespace composolve {

/// Distance-to-optimum measure for the strongly convex regime: the squared
/// distance is the headline value, the plain norm rides along.
struct DistanceMeasure {
    double squared = 0.0;
    double norm = 0.0;
};

inline DistanceMeasure subopt_sc(const Vector& x, const Vector& x_star) {
    double n = (x - x_star).norm();
    return {n * n, n};
}

/// Columns of A recovered by applying it to basis vectors. Measurement-side
/// fallback for maps without a structured Gram solve; O(n) applies.
inline Matrix materialize(const LinearMap& A) {
    Matrix M(A.m, A.n);
    Vector e = Vector::Zero(A.n);
    for (Index j = 0; j < A.n; ++j) {
        e[j] = 1.0;
        M.col(j) = A.apply(e);
        e[j] = 0.0;
    }
    return M;
}

/// Solves (A A^T) y = r through the map's structured hook when present,
/// otherwise densely; a rank-deficient Gram gets a 1e-14 ridge, turning the
/// solve into its least-squares surrogate.
inline Vector gram_solve_or_dense(const LinearMap& A, const Vector& r) {
    if (A.gram_solve) return A.gram_solve(r);
    Matrix M = materialize(A);
    Matrix G = M * M.transpose();
    if (A.sigma_min <= 0.0) G.diagonal().array() += 1e-14;
    return Eigen::LDLT<Matrix>(G).solve(r);
}

/// Euclidean projection onto {u : Au = b}: z - A^T (A A^T)^{-1} (Az - b).
inline Vector project_affine(const LinearMap& A, const Vector& b, const Vector& z) {
    Vector r = A.apply(z) - b;
    return z - A.adjoint(gram_solve_or_dense(A, r));
}

/// Minimal-norm KKT multiplier of min f over {Ax = b} at a known optimum:
/// lambda* = -(A A^T)^{-1} A grad f(x*).
inline Vector kkt_multiplier(const CompositeProblem& p, const Vector& x_star) {
    Vector g = p.f.gradient(x_star);
    return -gram_solve_or_dense(p.A, p.A.apply(g));
}

/// Stationarity measure for the non-convex regime:
///   L_f * || x - prox_{(1/L_f) h(A . - b)}( x - grad f(x) / (2 L_f) ) ||.
/// measurement_error reports the accuracy of the inner prox evaluation
/// (exact for the affine path, inner-solve tolerance otherwise).
struct NcSubopt {
    double value = 0.0;
    double measurement_error = 0.0;
};

inline NcSubopt subopt_nc(const Vector& x, const CompositeProblem& p) {
    const double L_f = p.f.L_f;
    if (!(L_f > 0.0)) throw ParameterError("subopt_nc: L_f must be positive");
    Vector z = x - p.f.gradient(x) / (2.0 * L_f);
    if (p.h.kind == ProxKind::indicator_zero) {
        Vector u = project_affine(p.A, p.b, z);
        return {L_f * (x - u).norm(), 0.0};
    }
    // General h: evaluate the prox as the strongly convex composite problem
    //   min_u 0.5 ||u - z||^2 + (1/L_f) h(Au - b)
    // to distance tolerance 1e-10 and report that tolerance.
    const double inner_tol = 1e-10;
    SmoothObjective fin;
    fin.dim = p.A.n;
    fin.L_f = 1.0;
    fin.mu_f = 1.0;
    Vector z_copy = z;
    fin.value = [z_copy](const Vector& u) { return 0.5 * (u - z_copy).squaredNorm(); };
    fin.gradient = [z_copy](const Vector& u) { return Vector(u - z_copy); };
    ProxCapableFunction hs;
    hs.kind = ProxKind::custom;
    auto base_prox = p.h.prox;
    auto base_value = p.h.value;
    hs.prox = [base_prox, L_f](double t, const Vector& w) { return base_prox(t / L_f, w); };
    hs.value = [base_value, L_f](const Vector& w) { return base_value(w) / L_f; };
    CompositeProblem q{fin, hs, p.A, p.b};
    ScConfig cfg;
    cfg.epsilon = inner_tol;
    SolverReport rep = solve_sc(q, z, cfg);
    return {L_f * (x - rep.x).norm(), L_f * inner_tol};
}

/// Surrogate objective gap for the convex regime:
///   f(x) + h_rho(Ax - b) - F*.
inline double subopt_c(const Vector& x, const CompositeProblem& p, double rho,
                       double F_star) {
    SurrogateSpec spec{rho};
    return p.f.value(x) + h_rho_value(p.h, spec, Vector(p.A.apply(x) - p.b)) - F_star;
}

namespace detail {

inline Index floor_div(Index a, Index b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

} // namespace detail

/// Which coordinates a linear-span method can have touched after k oracle
/// rounds on a chain instance started at zero. Writing k = (i-1)(N+1) + j
/// with 1 <= j <= N+1, the reachable set is every block up to depth i-1,
/// blocks 1..N+j-1 at depth i, and blocks 1..j-2 at depth i+1.
struct SupportPattern {
    Index N = 0, d = 0;
    Index i = 0, j = 0;

    static SupportPattern for_round(Index k, Index N, Index d) {
        SupportPattern s;
        s.N = N;
        s.d = d;
        s.i = detail::floor_div(k - 1, N + 1) + 1;
        s.j = k - (s.i - 1) * (N + 1);
        return s;
    }

    /// block in 1..2N, coord in 1..d
    bool allows(Index block, Index coord) const {
        if (coord <= i - 1) return true;
        if (coord == i && block <= N + j - 1) return true;
        if (coord == i + 1 && block <= j - 2) return true;
        return false;
    }
};

/// Exact-zero support test: true iff every coordinate of x outside the
/// round-k reachable set is exactly 0.0. Past depth d the pattern covers
/// everything. k <= 0 means no oracle round has happened: x must be all
/// zeros.
inline bool check_support(const Vector& x, Index k, Index N, Index d) {
    if (k <= 0) {
        for (Index t = 0; t < x.size(); ++t)
            if (x[t] != 0.0) return false;
        return true;
    }
    SupportPattern s = SupportPattern::for_round(k, N, d);
    if (s.i >= d) return true;
    for (Index block = 1; block <= 2 * N; ++block)
        for (Index coord = 1; coord <= d; ++coord)
            if (!s.allows(block, coord) && x[(block - 1) * d + (coord - 1)] != 0.0)
                return false;
    return true;
}

} // namespace composolve
