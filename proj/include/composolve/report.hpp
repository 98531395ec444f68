#pragma once

#include <functional>
#include <string>

#include "counters.hpp"
#include "trace.hpp"
#include "types.hpp"

namespace composolve {

/// Observation points a caller can attach to any solver run. counters, when
/// set, becomes the shared tally (nested solves aggregate into it);
/// on_iterate sees every primal iterate the method produces, inner loops
/// included, together with the tally at that moment. Used by the support
/// tracker and the lower-bound checks.
struct RunHooks {
    OracleCounters* counters = nullptr;
    std::function<void(const Vector&, const OracleCounters&)> on_iterate;

    void observe(const Vector& x, const OracleCounters& c) const {
        if (on_iterate) on_iterate(x, c);
    }
};

/// Uniform result record for every solver and baseline.
struct SolverReport {
    std::string algorithm;
    Vector x;
    Vector lambda;
    double tolerance = 0.0;
    OracleCounters counters;
    double wall_seconds = 0.0;
    long long outer_iterations = 0;
    bool converged = false;
    IterateTrace trace;
};

} // namespace composolve
