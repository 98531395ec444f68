#include <catch_amalgamated.hpp>

#include <composolve/composolve.hpp>

using namespace composolve;

TEST_CASE("perfectly conditioned problems finish in one step") {
    auto grad = [](const Vector& y) { return Vector(2.0 * y); };
    Vector y0 = Vector::Constant(3, 5.0);
    AgdResult r = agd(grad, y0, {2.0, 2.0, 1e-10, 100});
    CHECK(r.y.norm() <= 1e-10);
    CHECK(r.iters == 1);
}

TEST_CASE("a stationary start exits before iterating") {
    auto grad = [](const Vector&) { return Vector::Zero(2).eval(); };
    Vector y0 = Vector::Constant(2, 1.0);
    AgdResult r = agd(grad, y0, {4.0, 1.0, 0.5, 100});
    CHECK(r.iters == 0);
    CHECK((r.y - y0).norm() == 0.0);
}

TEST_CASE("iteration count respects the accelerated envelope") {
    // minimize 0.5 x^T diag(1,4) x from (1,1): kappa = 4
    Matrix Q(2, 2);
    Q << 1, 0, 0, 4;
    auto grad = [&Q](const Vector& y) { return Vector(Q * y); };
    Vector y0 = Vector::Constant(2, 1.0);
    double delta = 1e-6;
    AgdResult r = agd(grad, y0, {4.0, 1.0, delta, 100000});
    CHECK(r.y.norm() <= delta);
    // 2 sqrt(kappa) log(2 kappa ||y0 - y*|| / delta) + 1
    double bound = 2.0 * 2.0 * std::log(2.0 * 4.0 * y0.norm() / delta) + 1.0;
    CHECK(r.iters <= static_cast<long long>(bound) + 1);
    CHECK(r.iters <= 67);
}

TEST_CASE("observer fires once per full step") {
    Matrix Q(2, 2);
    Q << 1, 0, 0, 4;
    long long grads = 0;
    auto grad = [&Q, &grads](const Vector& y) {
        ++grads;
        return Vector(Q * y);
    };
    long long seen = 0;
    AgdResult r = agd(grad, Vector::Constant(2, 1.0), {4.0, 1.0, 1e-4, 1000},
                      [&](const Vector&) { ++seen; });
    CHECK(seen == r.iters);
    // one call at y0, then two per full step
    CHECK(grads == 2 * r.iters + 1);
}

TEST_CASE("bad arguments are rejected eagerly") {
    auto grad = [](const Vector& y) { return y; };
    Vector y0 = Vector::Ones(2);
    CHECK_THROWS_AS(agd(grad, y0, {1.0, 0.0, 1e-4, 10}), ParameterError);
    CHECK_THROWS_AS(agd(grad, y0, {1.0, 1.0, 0.0, 10}), ParameterError);
    CHECK_THROWS_AS(agd(grad, y0, {1.0, 1.0, 1e-4, 0}), ParameterError);
    CHECK_THROWS_AS(agd(grad, y0, {0.5, 1.0, 1e-4, 10}), ParameterError); // L < mu
}

TEST_CASE("exhausting the budget raises with the last iterate attached") {
    Matrix Q(2, 2);
    Q << 0.01, 0, 0, 1.0; // kappa = 100
    auto grad = [&Q](const Vector& y) { return Vector(Q * y); };
    Vector y0 = Vector::Constant(2, 10.0);
    try {
        agd(grad, y0, {1.0, 0.01, 1e-12, 1});
        FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK(e.residual > 0.0);
        CHECK(e.last_iterate.size() == 2);
        CHECK(std::string(e.what()).find("after 1 iterations") != std::string::npos);
    }
}

TEST_CASE("default budget is derived from the radius guess") {
    long long iters = agd_default_max_iters(4.0, 1.0, 1.0, 1e-6);
    // ceil(2 sqrt(4) log(2*4*1/1e-6)) + 64
    double expect = std::ceil(4.0 * std::log(8.0 / 1e-6)) + 64;
    CHECK(iters == static_cast<long long>(expect));
    CHECK(agd_default_max_iters(4.0, 1.0, 1e-9, 10.0) == 64); // log clamps at zero
}
