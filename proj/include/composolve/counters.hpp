#pragma once

#include <cstdint>

namespace composolve {

/// Tally of first-order oracle calls made by a run. Complexity claims are
/// stated in these units, so solvers route every oracle access through a
/// counted problem view (see with_counters in problem.hpp).
struct OracleCounters {
    std::int64_t grad_f = 0;
    std::int64_t apply_A = 0;
    std::int64_t apply_At = 0;
    std::int64_t prox_h = 0;

    std::int64_t total() const { return grad_f + apply_A + apply_At + prox_h; }

    OracleCounters operator-(const OracleCounters& o) const {
        return {grad_f - o.grad_f, apply_A - o.apply_A,
                apply_At - o.apply_At, prox_h - o.prox_h};
    }
};

} // namespace composolve
