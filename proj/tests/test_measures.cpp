#include <catch_amalgamated.hpp>

#include <composolve/composolve.hpp>

using namespace composolve;

TEST_CASE("distance measure reports squared norm and norm") {
    Vector x(2), xs(2);
    x << 1.0, 2.0;
    xs << 1.0, 2.0;
    DistanceMeasure m = subopt_sc(x, xs);
    CHECK(m.squared == 0.0);
    CHECK(m.norm == 0.0);
    x << 2.0, 4.0;
    m = subopt_sc(x, xs);
    CHECK(m.squared == Catch::Approx(5.0));
    CHECK(m.norm == Catch::Approx(std::sqrt(5.0)));
}

TEST_CASE("materialization recovers the dense matrix") {
    Rng rng(21);
    Matrix B(3, 5);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 5; ++j) B(i, j) = rng.normal();
    LinearMap A = make_dense_map(B);
    CHECK((materialize(A) - B).norm() <= 1e-14);
}

TEST_CASE("affine projection lands on the constraint and stays there") {
    Rng rng(33);
    Matrix B(2, 4);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 4; ++j) B(i, j) = rng.normal();
    LinearMap A = make_dense_map(B);
    Vector b = rng.normal_vector(2);
    Vector z = rng.normal_vector(4);
    Vector u = project_affine(A, b, z);
    CHECK((A.apply(u) - b).norm() <= 1e-12);
    CHECK((project_affine(A, b, u) - u).norm() <= 1e-12);
    // closed form z - A^T (A A^T)^{-1} (Az - b)
    Matrix G = B * B.transpose();
    Vector ref = z - B.transpose() * G.ldlt().solve(B * z - b);
    CHECK((u - ref).norm() <= 1e-12);
}

TEST_CASE("kkt multiplier certifies the chain optimum") {
    auto [inst, p] = make_sc_instance(4.0, 1.0, 3.0, 11, 2.0);
    Vector xs = inst.closed_form_optimum();
    Vector lam = kkt_multiplier(p, xs);
    Vector resid = p.f.gradient(xs) + p.A.adjoint(lam);
    CHECK(resid.norm() <= 1e-10 * std::max(1.0, lam.norm()));
}

TEST_CASE("stationarity measure vanishes at the constrained optimum") {
    auto [inst, p] = make_sc_instance(4.0, 1.0, 3.0, 11, 2.0);
    Vector xs = inst.closed_form_optimum();
    NcSubopt s = subopt_nc(xs, p);
    CHECK(s.value <= 1e-10);
    CHECK(s.measurement_error == 0.0);
    NcSubopt at0 = subopt_nc(Vector::Zero(p.A.n), p);
    CHECK(at0.value > 0.1); // far from stationary at the start
}

TEST_CASE("structured and dense projection paths agree") {
    auto [inst, p] = make_sc_instance(2.0, 0.5, 3.0, 8, 1.0);
    Rng rng(17);
    Vector x = rng.normal_vector(p.A.n);
    NcSubopt fast = subopt_nc(x, p);
    CompositeProblem q = p;
    q.A.gram_solve = nullptr; // force the dense fallback
    NcSubopt slow = subopt_nc(x, q);
    CHECK(std::fabs(fast.value - slow.value) <= 1e-10 * std::max(1.0, fast.value));
}

TEST_CASE("general regularizers route through the inner solve") {
    auto [inst, p] = make_sc_instance(2.0, 0.5, 3.0, 8, 1.0);
    // same constraint wrapped as an opaque prox: the measure must agree with
    // the affine path and report the inner tolerance it ran at
    CompositeProblem q = p;
    q.h.kind = ProxKind::custom;
    Rng rng(29);
    Vector x = rng.normal_vector(p.A.n);
    NcSubopt exact = subopt_nc(x, p);
    NcSubopt solved = subopt_nc(x, q);
    CHECK(solved.measurement_error == Catch::Approx(p.f.L_f * 1e-10));
    CHECK(std::fabs(solved.value - exact.value) <=
          1e-6 * std::max(1.0, exact.value));
}

TEST_CASE("surrogate gap measure is zero exactly at the optimum") {
    auto [inst, p] = make_c_instance(1.0, 3.0, 8, 1.0);
    Vector xs = inst.closed_form_optimum();
    double F_star = p.f.value(xs); // feasible optimum: surrogate term vanishes
    CHECK(subopt_c(xs, p, 1.0, F_star) == Catch::Approx(0.0).margin(1e-14));
    Vector x0 = Vector::Zero(p.A.n);
    double manual = p.f.value(x0) + 1.0 * (p.A.apply(x0) - p.b).norm() - F_star;
    CHECK(subopt_c(x0, p, 1.0, F_star) == Catch::Approx(manual));
    CHECK(subopt_c(x0, p, 1.0, F_star) > 0.0);
}

TEST_CASE("round index decomposes into depth and offset") {
    SupportPattern s1 = SupportPattern::for_round(1, 2, 5);
    CHECK(s1.i == 1);
    CHECK(s1.j == 1);
    SupportPattern s4 = SupportPattern::for_round(4, 2, 5);
    CHECK(s4.i == 2);
    CHECK(s4.j == 1);
    SupportPattern s3 = SupportPattern::for_round(3, 2, 5);
    CHECK(s3.i == 1);
    CHECK(s3.j == 3);
}

TEST_CASE("support pattern tables for small rounds") {
    // round 1 on N=2: only depth-1 coordinates of the first N blocks
    SupportPattern s1 = SupportPattern::for_round(1, 2, 5);
    CHECK(s1.allows(1, 1));
    CHECK(s1.allows(2, 1));
    CHECK_FALSE(s1.allows(3, 1));
    CHECK_FALSE(s1.allows(1, 2));
    // round 3 (i=1, j=3): depth 1 everywhere, depth 2 in the first block
    SupportPattern s3 = SupportPattern::for_round(3, 2, 5);
    CHECK(s3.allows(4, 1));
    CHECK(s3.allows(1, 2));
    CHECK_FALSE(s3.allows(2, 2));
    // round 4 (i=2, j=1): depth 1 everywhere, depth 2 in blocks 1..2
    SupportPattern s4 = SupportPattern::for_round(4, 2, 5);
    CHECK(s4.allows(4, 1));
    CHECK(s4.allows(2, 2));
    CHECK_FALSE(s4.allows(3, 2));
    CHECK_FALSE(s4.allows(1, 3));
}

TEST_CASE("support check is an exact-zero test") {
    const Index N = 2, d = 3, n = 2 * N * d;
    Vector x = Vector::Zero(n);
    CHECK(check_support(x, 0, N, d));
    x[0] = 1e-300;
    CHECK_FALSE(check_support(x, 0, N, d)); // any nonzero before round 1 fails
    x.setZero();
    x[0] = 0.5; // block 1, coord 1
    CHECK(check_support(x, 1, N, d));
    x[(3 - 1) * d] = 1e-300; // block 3, coord 1: unreachable at round 1
    CHECK_FALSE(check_support(x, 1, N, d));
    CHECK(check_support(x, 4, N, d)); // round 4 reaches depth 1 everywhere
    Vector full = Vector::Constant(n, 0.1);
    CHECK_FALSE(check_support(full, 1, N, d));
    CHECK(check_support(full, 100, N, d)); // pattern saturates past depth d
}
