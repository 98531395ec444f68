#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"
#include "problem.hpp"
#include "types.hpp"

namespace composolve {

/// prox_{h*/ell}(w) through Moreau's decomposition:
///   prox_{h*/ell}(w) = w - (1/ell) prox_{ell h}(ell w).
/// Non-expansive in w. This is the dual update kernel of the outer solvers.
inline Vector prox_conjugate_scaled(const ProxCapableFunction& h, double ell,
                                    const Vector& w) {
    if (!(ell > 0.0)) throw ParameterError("prox_conjugate_scaled: ell must be positive");
    return w - h.prox(ell, Vector(ell * w)) / ell;
}

/// Radius of the dual ball defining the Lipschitz surrogate h_rho.
struct SurrogateSpec {
    double rho = 0.0;
};

/// Closed-form value of h_rho(z) = sup_{||y|| <= rho} { <y,z> - h*(y) }.
/// Cone indicators give rho * ||P_polar(z)||; norms already rho-Lipschitz give
/// h(z) back. Anything else has no closed form here.
inline double h_rho_value(const ProxCapableFunction& h, const SurrogateSpec& spec,
                          const Vector& z) {
    if (!(spec.rho > 0.0)) throw ParameterError("h_rho_value: rho must be positive");
    switch (h.kind) {
        case ProxKind::indicator_zero:
            return spec.rho * z.norm(); // polar of {0} is everything
        case ProxKind::indicator_nonpositive_orthant:
            return spec.rho * z.cwiseMax(0.0).norm();
        case ProxKind::indicator_cone_with_projection: {
            if (!h.cone_polar_projection)
                throw UnsupportedProxError(prox_kind_name(h.kind),
                    "h_rho_value: cone kind lacks a polar projection");
            return spec.rho * h.cone_polar_projection(z).norm();
        }
        case ProxKind::euclidean_norm:
            if (spec.rho < 1.0)
                throw ParameterError("h_rho_value: euclidean_norm needs rho >= 1");
            return z.norm();
        case ProxKind::l1_norm: {
            double need = std::sqrt(static_cast<double>(z.size()));
            if (spec.rho < need)
                throw ParameterError("h_rho_value: l1_norm needs rho >= sqrt(m) = " +
                                     std::to_string(need));
            return z.lpNorm<1>();
        }
        default:
            throw UnsupportedProxError(prox_kind_name(h.kind),
                std::string("h_rho_value: no closed-form surrogate for kind ") +
                prox_kind_name(h.kind));
    }
}

} // namespace composolve
