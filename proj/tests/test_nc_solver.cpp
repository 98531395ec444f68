#include <catch_amalgamated.hpp>

#include <composolve/composolve.hpp>

using namespace composolve;

namespace {
// Smooth non-convex test objective: 0.5||x||^2 + sum_i cos(x_i).
// Hessian I - diag(cos x) sits in [0, 2I], so L_f = 2 is certified and the
// global minimum of the unconstrained part is n (attained at x = 0).
SmoothObjective make_cosine_bowl(Index n) {
    SmoothObjective f;
    f.dim = n;
    f.L_f = 2.0;
    f.mu_f = 0.0;
    f.value = [](const Vector& x) {
        return 0.5 * x.squaredNorm() + x.array().cos().sum();
    };
    f.gradient = [](const Vector& x) {
        return Vector(x - x.array().sin().matrix());
    };
    return f;
}
} // namespace

TEST_CASE("subproblem tolerance follows the half-over-k schedule") {
    CompositeProblem p;
    p.f.dim = 1;
    p.f.L_f = 1.0;
    p.f.mu_f = 0.0;
    p.f.value = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
    p.f.gradient = [](const Vector& x) { return x; };
    p.h = make_indicator_zero();
    p.A = make_dense_map(Matrix::Identity(1, 1));
    p.b = Vector::Zero(1);
    NcConfig cfg;
    cfg.T = 3;
    cfg.delta_prime = 4.0;
    NcResult out = solve_nc(p, cfg);
    REQUIRE(out.trace.size() == 3);
    CHECK(out.trace.rows[0][1] == Catch::Approx(1.0));
    CHECK(out.trace.rows[1][1] == Catch::Approx(0.5)); // sqrt(4/1) / (2*2)
    CHECK(out.trace.rows[2][1] == Catch::Approx(1.0 / 3.0));
    CHECK(out.best_subopt <= 1e-6); // the origin is the constrained optimum
}

TEST_CASE("worst-case chain meets the prescribed stationarity rate") {
    auto [inst, p] = make_nc_instance(1.0, 1.0, 3.0, 8);
    NcConfig cfg;
    cfg.T = 10;
    cfg.delta_prime = 1.0;
    OracleCounters tally;
    RunHooks hooks;
    hooks.counters = &tally;
    NcResult out = solve_nc(p, cfg, hooks);
    double bound = std::sqrt(5.0 * p.f.L_f * cfg.delta_prime / cfg.T);
    CHECK(out.best_subopt <= bound);
    CHECK(out.best_subopt == Catch::Approx(9.7152e-5).epsilon(1e-3));
    CHECK(out.best_k == 1);
    CHECK(out.best_x.size() == p.A.n);
    CHECK(tally.grad_f > 500);
    CHECK(tally.grad_f < 1500);
    CHECK(tally.total() == out.report.counters.total());
    // the trace's running tallies end at the report totals
    const auto& last = out.trace.rows.back();
    CHECK(static_cast<std::int64_t>(last[4]) == tally.grad_f);
    CHECK(static_cast<std::int64_t>(last[7]) == tally.prox_h);
}

TEST_CASE("looser inner tolerances spend fewer oracles") {
    auto [inst, p] = make_nc_instance(1.0, 1.0, 3.0, 8);
    NcConfig tight;
    tight.T = 10;
    tight.delta_prime = 1.0;
    NcResult a = solve_nc(p, tight);
    NcConfig loose = tight;
    loose.delta_scale = 10.0;
    NcResult b = solve_nc(p, loose);
    CHECK(b.report.counters.grad_f < a.report.counters.grad_f);
    // on this instance even the loose run keeps the rate certificate
    double bound = std::sqrt(5.0 * p.f.L_f * tight.delta_prime / tight.T);
    CHECK(a.best_subopt <= bound);
    CHECK(b.best_subopt <= bound);
}

TEST_CASE("finite penalties give a monotone objective trace") {
    const Index n = 4;
    Rng rng(41);
    Matrix B(3, n);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < n; ++j) B(i, j) = rng.normal();
    Vector x_ref = rng.normal_vector(n);
    CompositeProblem p;
    p.f = make_cosine_bowl(n);
    p.h = make_euclidean_norm();
    p.A = make_dense_map(B);
    p.b = B * x_ref;

    Vector x0 = rng.normal_vector(n) * 2.0;
    double F0 = p.f.value(x0) + (p.A.apply(x0) - p.b).norm();
    NcConfig cfg;
    cfg.T = 6;
    cfg.x0 = x0;
    cfg.delta_prime = F0 - static_cast<double>(n); // inf F >= inf f = n
    cfg.delta_scale = 1e-4; // near-exact prox steps make descent visible
    NcResult out = solve_nc(p, cfg);
    double bound = std::sqrt(5.0 * p.f.L_f * cfg.delta_prime / cfg.T);
    CHECK(out.best_subopt <= bound);
    for (std::size_t r = 0; r < out.trace.rows.size(); ++r) {
        double obj = out.trace.rows[r][3];
        CHECK(std::isfinite(obj));
        CHECK(obj >= static_cast<double>(n) - 1e-9);
        if (r > 0) CHECK(obj <= out.trace.rows[r - 1][3] + 1e-3);
    }
}

TEST_CASE("measurement stays off the oracle tally") {
    auto [inst, p] = make_nc_instance(1.0, 1.0, 3.0, 8);
    OracleCounters tally;
    RunHooks hooks;
    hooks.counters = &tally;
    NcResult out = solve_nc(p, {3, 1.0, Vector(), 1.0}, hooks);
    std::int64_t frozen = tally.total();
    NcSubopt again = subopt_nc(out.best_x, p);
    CHECK(again.value == Catch::Approx(out.best_subopt));
    CHECK(tally.total() == frozen);
}

TEST_CASE("nc solver rejects bad configurations") {
    auto [inst, p] = make_nc_instance(1.0, 1.0, 3.0, 8);
    CHECK_THROWS_AS(solve_nc(p, {0, 1.0, Vector(), 1.0}), ParameterError);
    CHECK_THROWS_AS(solve_nc(p, {5, 0.0, Vector(), 1.0}), ParameterError);
    CHECK_THROWS_AS(solve_nc(p, {5, 1.0, Vector(), 0.0}), ParameterError);
    CHECK_THROWS_AS(solve_nc(p, {5, 1.0, Vector::Ones(3), 1.0}), ParameterError);
    CompositeProblem q = p;
    q.f.L_f = 0.0;
    CHECK_THROWS_AS(solve_nc(q, {5, 1.0, Vector(), 1.0}), ParameterError);
}
