#include <catch_amalgamated.hpp>

#include <composolve/composolve.hpp>

using namespace composolve;

TEST_CASE("the full verification suite is green") {
    auto checks = run_verification_suite(42);
    REQUIRE(checks.size() >= 20);
    for (const auto& c : checks) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.pass);
    }
}

TEST_CASE("distance floor applicability follows the round index") {
    ScChainInstance inst{2, 6, 9.0, 1.0, 1.0};
    Vector x_star = inst.closed_form_optimum();
    Vector x0 = Vector::Zero(x_star.size());

    auto r0 = distance_lower_bound_check(inst, x_star, x0, x0, 0);
    CHECK_FALSE(r0.applicable);

    // round 1 maps to depth K=0: the floor is the full initial distance over 4
    auto r1 = distance_lower_bound_check(inst, x_star, x0, x0, 1);
    REQUIRE(r1.applicable);
    CHECK(r1.K == 0);
    CHECK(r1.lower == Catch::Approx(0.25 * x_star.squaredNorm()));
    CHECK(r1.holds);

    // deep rounds where 2K exceeds d say nothing
    auto deep = distance_lower_bound_check(inst, x_star, x0, x0, 1000);
    CHECK_FALSE(deep.applicable);
}

TEST_CASE("distance floor flags an inflated decay base") {
    // With the reciprocal base the floor grows instead of shrinking, so even
    // the true optimum violates it: the probe that guards against a silently
    // wrong q in the instance builder.
    ScChainInstance inst{2, 8, 9.0, 1.0, 1.0};
    Vector x_star = inst.closed_form_optimum();
    Vector x0 = Vector::Zero(x_star.size());
    Index round = 2 + (inst.N + 1) * 2; // depth K=3
    auto honest = distance_lower_bound_check(inst, x_star, x0, x_star, round);
    REQUIRE(honest.applicable);
    CHECK(honest.K == 3);
    CHECK_FALSE(honest.holds); // sitting at x* beats any positive floor

    auto inflated =
        distance_lower_bound_check(inst, x_star, x0, x0, round, 1.0 / inst.q());
    REQUIRE(inflated.applicable);
    CHECK(inflated.lower > x_star.squaredNorm()); // floor blown past the start
}

TEST_CASE("support audit counts violations against the oracle tally") {
    SupportAudit audit;
    audit.N = 2;
    audit.d = 4;
    audit.window_max = 3;
    OracleCounters tally;
    RunHooks hooks = audit_hooks(audit, tally);
    REQUIRE(hooks.counters == &tally);
    REQUIRE(hooks.on_iterate);

    Index n = 2 * audit.N * audit.d;
    Vector ok = Vector::Zero(n);
    tally.grad_f = 1;
    ok(0) = 1.0; // first block of the first coordinate is open at round 1
    hooks.on_iterate(ok, tally);
    CHECK(audit.observations == 1);
    CHECK(audit.violations == 0);
    CHECK(audit.window.size() == 1);

    Vector bad = Vector::Zero(n);
    bad(n - 1) = 1e-300; // deepest coordinate cannot be touched this early
    tally.grad_f = 2;
    hooks.on_iterate(bad, tally);
    CHECK(audit.violations == 1);
    CHECK(audit.first_violation_round == 2);

    tally.grad_f = 9; // outside the retention window
    hooks.on_iterate(ok, tally);
    CHECK(audit.observations == 3);
    CHECK(audit.window.size() == 2);
    CHECK(audit.window.back().first == 2);
}

TEST_CASE("envelope replay keeps aligned per-step series") {
    auto [inst, p] = make_sc_instance(2.0, 0.5, 3.0, 9, 1.0);
    Vector x_star = inst.closed_form_optimum();
    Vector x0 = Vector::Zero(p.A.n);
    Vector lambda_star = kkt_multiplier(p, x_star);
    ScEnvelope env = sc_envelope_run(p, x0, x_star, lambda_star, 1e-3, 1.0);

    CHECK(env.rho == Catch::Approx(1.0 / 12.0));
    REQUIRE(env.delta.size() >= 2);
    CHECK(env.dual_err.size() == env.delta.size());
    CHECK(env.dual_prev_err.size() == env.delta.size());
    CHECK(env.primal_err.size() == env.delta.size());
    CHECK(env.inner_iters.size() == env.delta.size());
    for (size_t k = 1; k < env.dual_prev_err.size(); ++k)
        CHECK(env.dual_prev_err[k] == Catch::Approx(env.dual_err[k - 1]));
    CHECK(env.dual_err.back() < env.dual_err.front());
    CHECK(env.primal_err.back() < 1e-2);
    CHECK(env.delta.back() < env.delta.front());
}
