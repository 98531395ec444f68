#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "counters.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "types.hpp"

namespace composolve {

inline constexpr double kDomainTol = 1e-12; // dom-h membership cutoff
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Smooth part f of the composite objective. L_f and mu_f are caller-certified
/// bounds: the gradient is L_f-Lipschitz and f - (mu_f/2)||x||^2 is convex
/// (mu_f = 0 for merely convex or non-convex f).
struct SmoothObjective {
    Index dim = 0;
    double L_f = 0.0;
    double mu_f = 0.0;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
};

/// Matrix-free linear operator with certified spectral bounds.
/// L_A >= ||A||, sigma_min is the smallest singular value (0 when A is not
/// full row rank), sigma_min_nz the smallest nonzero one. gram_solve, when
/// present, solves (A A^T) y = r and is used by measurement code only.
struct LinearMap {
    Index m = 0, n = 0;
    double L_A = 0.0;
    double sigma_min = 0.0;
    double sigma_min_nz = 0.0;
    std::function<Vector(const Vector&)> apply;   // R^n -> R^m
    std::function<Vector(const Vector&)> adjoint; // R^m -> R^n
    std::function<Vector(const Vector&)> gram_solve; // optional
};

enum class ProxKind {
    indicator_zero,
    indicator_nonpositive_orthant,
    indicator_cone_with_projection,
    euclidean_norm,
    l1_norm,
    custom
};

inline const char* prox_kind_name(ProxKind k) {
    switch (k) {
        case ProxKind::indicator_zero: return "indicator_zero";
        case ProxKind::indicator_nonpositive_orthant: return "indicator_nonpositive_orthant";
        case ProxKind::indicator_cone_with_projection: return "indicator_cone_with_projection";
        case ProxKind::euclidean_norm: return "euclidean_norm";
        case ProxKind::l1_norm: return "l1_norm";
        case ProxKind::custom: return "custom";
    }
    return "unknown";
}

/// Convex regularizer h with an evaluable prox. value may return +inf.
/// prox(t, z) = argmin_u { t*h(u) + 0.5*||z-u||^2 }.
struct ProxCapableFunction {
    ProxKind kind = ProxKind::custom;
    std::function<double(const Vector&)> value;
    std::function<Vector(double, const Vector&)> prox;
    std::function<Vector(const Vector&)> cone_polar_projection; // cone kinds only
};

inline ProxCapableFunction make_indicator_zero() {
    ProxCapableFunction h;
    h.kind = ProxKind::indicator_zero;
    h.value = [](const Vector& z) {
        return z.lpNorm<Eigen::Infinity>() <= kDomainTol ? 0.0 : kInf;
    };
    h.prox = [](double, const Vector& z) { return Vector(Vector::Zero(z.size())); };
    h.cone_polar_projection = [](const Vector& z) { return z; }; // polar of {0}
    return h;
}

inline ProxCapableFunction make_indicator_nonpositive_orthant() {
    ProxCapableFunction h;
    h.kind = ProxKind::indicator_nonpositive_orthant;
    h.value = [](const Vector& z) {
        return z.maxCoeff() <= kDomainTol ? 0.0 : kInf;
    };
    h.prox = [](double, const Vector& z) { return Vector(z.cwiseMin(0.0)); };
    h.cone_polar_projection = [](const Vector& z) { return Vector(z.cwiseMax(0.0)); };
    return h;
}

/// Indicator of a closed convex cone K given its Euclidean projection. The
/// polar projection comes for free from z = P_K(z) + P_polar(z).
inline ProxCapableFunction make_indicator_cone(std::function<Vector(const Vector&)> project_onto_cone) {
    ProxCapableFunction h;
    h.kind = ProxKind::indicator_cone_with_projection;
    auto proj = std::move(project_onto_cone);
    h.value = [proj](const Vector& z) {
        return (z - proj(z)).norm() <= kDomainTol ? 0.0 : kInf;
    };
    h.prox = [proj](double, const Vector& z) { return proj(z); };
    h.cone_polar_projection = [proj](const Vector& z) { return Vector(z - proj(z)); };
    return h;
}

inline ProxCapableFunction make_euclidean_norm() {
    ProxCapableFunction h;
    h.kind = ProxKind::euclidean_norm;
    h.value = [](const Vector& z) { return z.norm(); };
    h.prox = [](double t, const Vector& z) {
        double nz = z.norm();
        if (nz <= t) return Vector(Vector::Zero(z.size()));
        return Vector((1.0 - t / nz) * z);
    };
    return h;
}

inline ProxCapableFunction make_l1_norm() {
    ProxCapableFunction h;
    h.kind = ProxKind::l1_norm;
    h.value = [](const Vector& z) { return z.lpNorm<1>(); };
    h.prox = [](double t, const Vector& z) {
        Vector u(z.size());
        for (Index i = 0; i < z.size(); ++i) {
            double a = std::fabs(z[i]) - t;
            u[i] = a > 0.0 ? (z[i] > 0.0 ? a : -a) : 0.0;
        }
        return u;
    };
    return h;
}

/// min_x f(x) + h(Ax - b).
struct CompositeProblem {
    SmoothObjective f;
    ProxCapableFunction h;
    LinearMap A;
    Vector b;
};

/// View of a problem whose oracles bump the shared tally on every call.
/// gram_solve is deliberately left uncounted: it serves measurement, not the
/// algorithms.
inline CompositeProblem with_counters(const CompositeProblem& p, OracleCounters& c) {
    CompositeProblem q = p;
    auto* tally = &c;
    auto g = p.f.gradient;
    q.f.gradient = [g, tally](const Vector& x) { ++tally->grad_f; return g(x); };
    auto ap = p.A.apply;
    q.A.apply = [ap, tally](const Vector& x) { ++tally->apply_A; return ap(x); };
    auto at = p.A.adjoint;
    q.A.adjoint = [at, tally](const Vector& y) { ++tally->apply_At; return at(y); };
    auto pr = p.h.prox;
    q.h.prox = [pr, tally](double t, const Vector& z) { ++tally->prox_h; return pr(t, z); };
    return q;
}

/// Dense map helper: spectral data from an SVD. This is the validation-side
/// estimator; production instances carry certified bounds instead.
inline LinearMap make_dense_map(const Matrix& A) {
    LinearMap L;
    L.m = A.rows();
    L.n = A.cols();
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    double smax = s.size() ? s[0] : 0.0;
    L.L_A = smax;
    double rank_tol = smax * std::max(A.rows(), A.cols()) *
                      std::numeric_limits<double>::epsilon();
    double snz = 0.0;
    for (Index i = s.size() - 1; i >= 0; --i)
        if (s[i] > rank_tol) { snz = s[i]; break; }
    L.sigma_min_nz = snz;
    L.sigma_min = (A.rows() <= A.cols() && s.size() == A.rows() &&
                   s[s.size() - 1] > rank_tol)
                      ? s[s.size() - 1]
                      : 0.0;
    auto mat = std::make_shared<Matrix>(A);
    L.apply = [mat](const Vector& x) { return Vector(*mat * x); };
    L.adjoint = [mat](const Vector& y) { return Vector(mat->transpose() * y); };
    auto gram = std::make_shared<Eigen::LDLT<Matrix>>(Matrix(A * A.transpose()));
    if (L.sigma_min > 0.0) {
        L.gram_solve = [gram](const Vector& r) { return Vector(gram->solve(r)); };
    }
    return L;
}

/// f(x) = 0.5 x^T Q x + c^T x with Q symmetric PSD; bounds from eigenvalues.
inline SmoothObjective make_quadratic(const Matrix& Q, const Vector& c) {
    SmoothObjective f;
    f.dim = Q.rows();
    Eigen::SelfAdjointEigenSolver<Matrix> es(Q);
    f.L_f = std::max(0.0, es.eigenvalues().maxCoeff());
    f.mu_f = std::max(0.0, es.eigenvalues().minCoeff());
    auto Qp = std::make_shared<Matrix>(Q);
    auto cp = std::make_shared<Vector>(c);
    f.value = [Qp, cp](const Vector& x) {
        return 0.5 * x.dot(*Qp * x) + cp->dot(x);
    };
    f.gradient = [Qp, cp](const Vector& x) { return Vector(*Qp * x + *cp); };
    return f;
}

/// Sampled sanity sweep over the declared invariants. Returns human-readable
/// diagnostics; empty means no violation detected. Never throws.
inline std::vector<std::string> validate(const CompositeProblem& p,
                                         std::uint64_t seed = 20240817,
                                         int samples = 20) {
    std::vector<std::string> diag;
    char buf[160];
    if (p.f.dim != p.A.n) {
        std::snprintf(buf, sizeof(buf), "dimension mismatch: f.dim=%lld, A.n=%lld",
                      static_cast<long long>(p.f.dim), static_cast<long long>(p.A.n));
        diag.push_back(buf);
    }
    if (p.b.size() != p.A.m) {
        std::snprintf(buf, sizeof(buf), "dimension mismatch: len(b)=%lld, A.m=%lld",
                      static_cast<long long>(p.b.size()), static_cast<long long>(p.A.m));
        diag.push_back(buf);
    }
    if (p.f.L_f <= 0.0) diag.push_back("L_f must be positive");
    if (p.f.mu_f < 0.0 || p.f.mu_f > p.f.L_f * (1.0 + 1e-12))
        diag.push_back("mu_f outside [0, L_f]");
    if (p.A.sigma_min > p.A.sigma_min_nz * (1.0 + 1e-12))
        diag.push_back("sigma_min exceeds sigma_min_nz");
    if (p.A.sigma_min_nz > p.A.L_A * (1.0 + 1e-12))
        diag.push_back("sigma_min_nz exceeds L_A");
    if (!diag.empty()) return diag; // sampling needs consistent dimensions

    Rng rng(seed);
    bool lip_bad = false, mono_bad = false, adj_bad = false, norm_bad = false,
         nonexp_bad = false;
    for (int s = 0; s < samples; ++s) {
        Vector x = rng.normal_vector(p.A.n), xp = rng.normal_vector(p.A.n);
        if (p.f.gradient) {
            Vector dg = p.f.gradient(x) - p.f.gradient(xp);
            double dx = (x - xp).norm();
            if (dg.norm() > p.f.L_f * dx * (1.0 + 1e-6)) lip_bad = true;
            if (p.f.mu_f > 0.0 && dg.dot(x - xp) < p.f.mu_f * dx * dx * (1.0 - 1e-6))
                mono_bad = true;
        }
        Vector y = rng.normal_vector(p.A.m);
        Vector Ax = p.A.apply(x);
        double lhs = Ax.dot(y), rhs = x.dot(p.A.adjoint(y));
        double scale = std::max({std::fabs(lhs), std::fabs(rhs), 1.0});
        if (std::fabs(lhs - rhs) > 1e-10 * scale) adj_bad = true;
        if (Ax.norm() > p.A.L_A * x.norm() * (1.0 + 1e-10)) norm_bad = true;
        if (p.h.prox) {
            Vector z = rng.normal_vector(p.A.m), zp = rng.normal_vector(p.A.m);
            double t = 0.1 + rng.uniform();
            if ((p.h.prox(t, z) - p.h.prox(t, zp)).norm() >
                (z - zp).norm() * (1.0 + 1e-10))
                nonexp_bad = true;
        }
    }
    if (lip_bad) diag.push_back("gradient Lipschitz bound L_f violated on samples");
    if (mono_bad) diag.push_back("strong convexity modulus mu_f violated on samples");
    if (adj_bad) diag.push_back("adjoint inconsistent with apply on samples");
    if (norm_bad) diag.push_back("operator norm bound L_A violated on samples");
    if (nonexp_bad) diag.push_back("prox not non-expansive on samples");
    return diag;
}

} // namespace composolve
