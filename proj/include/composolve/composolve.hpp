#pragma once

// Umbrella header: the whole library in dependency order.

#include "types.hpp"
#include "counters.hpp"
#include "trace.hpp"
#include "errors.hpp"
#include "rng.hpp"
#include "problem.hpp"
#include "prox.hpp"
#include "report.hpp"
#include "agd.hpp"
#include "chain.hpp"
#include "sc_solver.hpp"
#include "measures.hpp"
#include "nc_solver.hpp"
#include "cvx_solver.hpp"
#include "baselines.hpp"
#include "serialization.hpp"
#include "verification.hpp"
