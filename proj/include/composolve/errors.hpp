#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "trace.hpp"
#include "types.hpp"

namespace composolve {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration / problem data.
struct ParameterError : SolverError {
    using SolverError::SolverError;
};

/// The requested operation has no closed form / no supported path for the
/// given regularizer kind.
struct UnsupportedProxError : SolverError {
    std::string kind;
    UnsupportedProxError(std::string k, const std::string& what)
        : SolverError(what), kind(std::move(k)) {}
};

/// Solver path that needs mu_f > 0 got a problem declaring mu_f = 0.
struct NotStronglyConvexError : SolverError {
    using SolverError::SolverError;
};

/// Iteration cap hit before the exit test fired. Carries whatever progress
/// was made so callers can salvage a partial result.
struct NonConvergenceError : SolverError {
    Vector last_iterate;
    double residual;
    IterateTrace trace;
    NonConvergenceError(const std::string& what, Vector last, double res,
                        IterateTrace tr = {})
        : SolverError(what), last_iterate(std::move(last)), residual(res),
          trace(std::move(tr)) {}
};

/// Iterates blew past the divergence guard.
struct DivergenceError : SolverError {
    long long iteration;
    DivergenceError(const std::string& what, long long iter)
        : SolverError(what), iteration(iter) {}
};

/// Scalar root finder could not bracket or refine a root.
struct RootBracketError : SolverError {
    using SolverError::SolverError;
};

} // namespace composolve
