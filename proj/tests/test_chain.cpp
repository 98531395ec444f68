#include <catch_amalgamated.hpp>

#include <composolve/composolve.hpp>

using namespace composolve;

TEST_CASE("tridiagonal elimination matches a dense solve") {
    Rng rng(3);
    const Index n = 12;
    Vector lower = Vector::Constant(n - 1, -1.0);
    Vector upper = Vector::Constant(n - 1, -1.0);
    Vector diag = Vector::Constant(n, 2.5);
    Vector rhs = rng.normal_vector(n);
    Vector x = solve_tridiagonal(lower, diag, upper, rhs);
    Matrix T = Matrix::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
        T(i, i) = 2.5;
        if (i + 1 < n) { T(i, i + 1) = -1.0; T(i + 1, i) = -1.0; }
    }
    Vector ref = T.ldlt().solve(rhs);
    CHECK((x - ref).norm() <= 1e-12 * ref.norm());
}

TEST_CASE("chain operator agrees with its dense materialization") {
    LinearMap A = build_chain_matrix(2, 3);
    CHECK(A.n == 12);
    CHECK(A.m == 9);
    CHECK(A.L_A == 2.0);
    Matrix M = materialize(A);
    Rng rng(7);
    Vector x = rng.normal_vector(A.n), y = rng.normal_vector(A.m);
    CHECK((A.apply(x) - M * x).norm() <= 1e-14);
    CHECK((A.adjoint(y) - M.transpose() * y).norm() <= 1e-14);
    // gram_solve inverts A A^T
    Vector r = rng.normal_vector(A.m);
    Vector s = A.gram_solve(r);
    CHECK((A.apply(A.adjoint(s)) - r).norm() <= 1e-12 * r.norm());
}

TEST_CASE("chain gram spectrum matches the cosine formula") {
    LinearMap A = build_chain_matrix(2, 1);
    Matrix M = materialize(A);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(M * M.transpose()));
    Vector eig = es.eigenvalues(); // ascending
    CHECK(eig[0] == Catch::Approx(2.0 - std::sqrt(2.0)));
    CHECK(eig[1] == Catch::Approx(2.0));
    CHECK(eig[2] == Catch::Approx(2.0 + std::sqrt(2.0)));
    CHECK(A.sigma_min == Catch::Approx(std::sqrt(2.0 - std::sqrt(2.0))));
    CHECK(A.sigma_min_nz == A.sigma_min);
}

TEST_CASE("duplicate-row variant loses row rank but keeps the kernel") {
    LinearMap A = build_chain_matrix_duplicate_row(2, 3);
    CHECK(A.m == 12); // 2Nd
    CHECK(A.n == 12);
    CHECK(A.L_A == Catch::Approx(std::sqrt(6.0)));
    CHECK(A.sigma_min == 0.0);
    CHECK(A.sigma_min_nz == Catch::Approx(std::sqrt(2.0 - std::sqrt(2.0))));
    CHECK_FALSE(A.gram_solve);
    Matrix M = materialize(A);
    // last d rows repeat the first d rows
    CHECK((M.bottomRows(3) - M.topRows(3)).norm() == 0.0);
    Rng rng(9);
    Vector x = rng.normal_vector(A.n), y = rng.normal_vector(A.m);
    CHECK(std::fabs(A.apply(x).dot(y) - x.dot(A.adjoint(y))) <= 1e-12);
    // certified bounds hold for the materialized operator
    Eigen::JacobiSVD<Matrix> svd(M);
    CHECK(svd.singularValues()[0] <= A.L_A + 1e-12);
}

TEST_CASE("chain builders reject degenerate shapes") {
    CHECK_THROWS_AS(build_chain_matrix(0, 3), ParameterError);
    CHECK_THROWS_AS(build_chain_matrix(2, 0), ParameterError);
}

TEST_CASE("strongly convex chain closed form") {
    ScChainInstance inst{2, 1, 9.0, 1.0, 2.0};
    CHECK(inst.q() == Catch::Approx(0.5));
    CHECK(inst.beta() == Catch::Approx(0.5));
    SECTION("depth-one optimum has two equivalent forms") {
        Vector vs = inst.vstar();
        REQUIRE(vs.size() == 1);
        CHECK(vs[0] == Catch::Approx(4.0 / 3.0));            // alpha / (1 + beta)
        double q = 0.5;
        CHECK(vs[0] == Catch::Approx(2.0 * q / (q * q - q + 1.0)));
    }
    SECTION("stacked optimum repeats the block vector") {
        Vector xs = inst.closed_form_optimum();
        REQUIRE(xs.size() == 4);
        for (int i = 0; i < 4; ++i) CHECK(xs[i] == Catch::Approx(4.0 / 3.0));
        CHECK(xs.squaredNorm() ==
              Catch::Approx(2.0 * inst.N * inst.vstar().squaredNorm()));
    }
}

TEST_CASE("deep chain optimum satisfies its tridiagonal stationarity system") {
    ScChainInstance inst{1, 10, 4.0, 1.0, 1.5};
    Vector v = inst.vstar();
    double beta = inst.beta();
    // (2+beta) v_1 - v_2 = alpha; -v_{i-1} + (2+beta) v_i - v_{i+1} = 0;
    // -v_{d-1} + (1+beta) v_d = 0
    Vector res(inst.d);
    res[0] = (2.0 + beta) * v[0] - v[1] - inst.alpha;
    for (Index i = 1; i + 1 < inst.d; ++i)
        res[i] = -v[i - 1] + (2.0 + beta) * v[i] - v[i + 1];
    res[inst.d - 1] = -v[inst.d - 2] + (1.0 + beta) * v[inst.d - 1];
    CHECK(res.lpNorm<Eigen::Infinity>() <= 1e-12 * inst.alpha);
}

TEST_CASE("chain optimum is stationary on the consensus subspace") {
    auto [inst, p] = make_sc_instance(3.0, 0.5, 5.0, 12, 2.0);
    Vector xs = inst.closed_form_optimum();
    CHECK((p.A.apply(xs)).norm() <= 1e-12); // feasible
    CHECK(std::fabs((Vector::Zero(p.A.n) - xs).norm() - 2.0) <= 1e-12);
    // the kernel of A is the consensus line per coordinate: the block sum of
    // the gradient must vanish at the constrained optimum
    Vector g = p.f.gradient(xs);
    Vector blocksum = Vector::Zero(inst.d);
    for (Index b = 0; b < 2 * inst.N; ++b) blocksum += g.segment(b * inst.d, inst.d);
    CHECK(blocksum.lpNorm<Eigen::Infinity>() <= 1e-12 * g.lpNorm<Eigen::Infinity>());
}

TEST_CASE("chain objective value and gradient at the origin") {
    ScChainInstance inst{2, 4, 1.0, 0.25, 1.0};
    SmoothObjective f = inst.objective();
    Vector zero = Vector::Zero(16);
    CHECK(f.value(zero) == Catch::Approx(0.375)); // N c alpha^2, c = 0.1875
    Vector g = f.gradient(zero);
    for (Index b = 0; b < 2; ++b) {
        CHECK(g[b * 4] == Catch::Approx(-0.375)); // -2 c alpha
        for (Index i = 1; i < 4; ++i) CHECK(g[b * 4 + i] == 0.0);
    }
    for (Index i = 8; i < 16; ++i) CHECK(g[i] == 0.0);
}

TEST_CASE("tail mass of the chain optimum decays no faster than q^2K") {
    ScChainInstance inst{1, 8, 16.0, 1.0, 1.0};
    Vector v = inst.vstar();
    double q = inst.q();
    for (Index K : {2, 4, 6}) {
        double tail = v.tail(inst.d - K).squaredNorm();
        double floor_bound = std::pow(q, 2.0 * K) *
                             (static_cast<double>(inst.d - K) / inst.d) *
                             v.squaredNorm();
        CHECK(tail >= floor_bound * (1.0 - 1e-12));
    }
}

TEST_CASE("bump pair values are exact where they should be") {
    using NC = NcChainInstance;
    CHECK(NC::psi(0.3) == 0.0);
    CHECK(NC::psi(0.5) == 0.0);
    CHECK(NC::psi(1.0) == Catch::Approx(1.0));
    CHECK(NC::psi(0.75) == Catch::Approx(std::exp(-3.0)));
    CHECK(NC::psi_prime(0.5) == 0.0);
    CHECK(NC::psi_prime(-2.0) == 0.0);
    CHECK(NC::phi(0.0) == Catch::Approx(2.0663656770612464).epsilon(1e-14));
    CHECK(NC::phi_prime(0.0) == Catch::Approx(1.6487212707001282).epsilon(1e-14));
    Vector z = Vector::Zero(3);
    CHECK(NC::g0_value(z, z) == Catch::Approx(-2.0663656770612464).epsilon(1e-14));
}

TEST_CASE("non-convex chain gradient at the origin touches one coordinate per block") {
    NcChainInstance inst{2, 3, 1.0, 2.0};
    SmoothObjective f = inst.objective();
    Vector g = f.gradient(Vector::Zero(12));
    double expect = -(1.0 * 2.0 / NcChainInstance::l0) * std::sqrt(std::numbers::e);
    for (Index b = 0; b < 2; ++b) {
        CHECK(g[b * 3] == Catch::Approx(expect).epsilon(1e-14));
        CHECK(g[b * 3 + 1] == 0.0);
        CHECK(g[b * 3 + 2] == 0.0);
    }
    for (Index i = 6; i < 12; ++i) CHECK(g[i] == 0.0);
    CHECK(inst.initial_gap_bound() ==
          Catch::Approx(12.0 * 2 * 3 * 1.0 * 4.0 / 600000.0));
    CHECK(inst.stationarity_floor() == Catch::Approx(2.0 / 600000.0));
}

TEST_CASE("budget sizing recipes") {
    SECTION("block count from the condition target") {
        auto [i3, p3] = make_sc_instance(1.0, 0.5, 3.0, 8, 1.0);
        CHECK(i3.N == 2);
        auto [i5, p5] = make_sc_instance(1.0, 0.5, 5.0, 9, 1.0);
        CHECK(i5.N == 3);
    }
    SECTION("depth from the round budget") {
        auto [inst, p] = make_sc_instance(1.0, 0.5, 3.0, 15, 1.0);
        CHECK(inst.d == 10); // K = (15-2)/3 + 1 = 5
        CHECK(p.A.n == 40);
        CHECK(p.A.m == 30);
    }
    SECTION("start-to-optimum distance is honored") {
        auto [inst, p] = make_sc_instance(2.0, 0.25, 3.0, 11, 7.0);
        CHECK(inst.closed_form_optimum().norm() == Catch::Approx(7.0));
        CHECK(validate(p).empty());
    }
    SECTION("non-convex depth and amplitude") {
        auto [inst, p] = make_nc_instance(2.0, 0.8, 3.0, 8);
        CHECK(inst.N == 2);
        CHECK(inst.d == 5); // K + 2
        CHECK(inst.alpha ==
              Catch::Approx(std::sqrt(600000.0 * 0.8 / (12.0 * 2 * 5 * 2.0))));
        CHECK(inst.initial_gap_bound() == Catch::Approx(0.8));
        CHECK(validate(p).empty());
    }
    SECTION("convex reduction hides the true modulus") {
        auto [inst, p] = make_c_instance(1.0, 3.0, 8, 1.0);
        CHECK(p.f.mu_f == 0.0);
        Index K = inst.d / 2;
        CHECK(inst.mu_f == Catch::Approx(1.0 / ((K + 1.0) * (K + 1.0))));
        // the hidden geometric rate never decays below e^{-4} over 2K steps
        for (Index kk = 1; kk <= 8; ++kk) {
            double qv = static_cast<double>(kk) / (kk + 2.0);
            CHECK(std::pow(qv, 2.0 * kk) >= std::exp(-4.0));
        }
    }
    SECTION("degenerate requests are rejected") {
        CHECK_THROWS_AS(make_sc_instance(1.0, 1.0, 3.0, 8, 1.0), ParameterError);
        CHECK_THROWS_AS(make_sc_instance(1.0, 0.5, 0.5, 8, 1.0), ParameterError);
        CHECK_THROWS_AS(make_sc_instance(1.0, 0.5, 3.0, 1, 1.0), ParameterError);
        CHECK_THROWS_AS(make_sc_instance(1.0, 0.5, 3.0, 8, 0.0), ParameterError);
        CHECK_THROWS_AS(make_nc_instance(0.0, 1.0, 3.0, 8), ParameterError);
        CHECK_THROWS_AS(make_nc_instance(1.0, 0.0, 3.0, 8), ParameterError);
        CHECK_THROWS_AS(make_c_instance(1.0, 3.0, 1, 1.0), ParameterError);
    }
}
