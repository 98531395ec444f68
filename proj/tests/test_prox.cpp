#include <catch_amalgamated.hpp>

#include <composolve/composolve.hpp>

using namespace composolve;

namespace {
Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}
} // namespace

TEST_CASE("indicator-of-zero prox collapses to the origin") {
    ProxCapableFunction h = make_indicator_zero();
    Vector z = vec2(3.0, -1.0);
    CHECK(h.prox(1.0, z).norm() == 0.0);
    CHECK(h.value(Vector::Zero(2)) == 0.0);
    CHECK(h.value(z) == kInf);
    // conjugate is identically zero, so its prox is the identity
    Vector w = prox_conjugate_scaled(h, 2.0, z);
    CHECK((w - z).norm() == 0.0);
    CHECK_THROWS_AS(prox_conjugate_scaled(h, 0.0, z), ParameterError);
}

TEST_CASE("nonpositive-orthant prox clips from above") {
    ProxCapableFunction h = make_indicator_nonpositive_orthant();
    Vector z = vec2(3.0, -1.0);
    Vector p = h.prox(1.0, z);
    CHECK(p[0] == 0.0);
    CHECK(p[1] == -1.0);
    CHECK(h.value(vec2(-1.0, 0.0)) == 0.0);
    CHECK(h.value(vec2(1e-6, 0.0)) == kInf);
    CHECK(h.value(vec2(1e-14, 0.0)) == 0.0); // inside the domain tolerance
}

TEST_CASE("euclidean norm prox shrinks radially") {
    ProxCapableFunction h = make_euclidean_norm();
    Vector p = h.prox(1.0, vec2(3.0, 4.0));
    CHECK(p[0] == Catch::Approx(2.4));
    CHECK(p[1] == Catch::Approx(3.2));
    CHECK(h.prox(1.0, vec2(0.3, 0.4)).norm() == 0.0);
    // conjugate prox projects onto the unit ball
    Vector w = prox_conjugate_scaled(h, 1.0, vec2(3.0, 4.0));
    CHECK(w[0] == Catch::Approx(0.6));
    CHECK(w[1] == Catch::Approx(0.8));
}

TEST_CASE("l1 conjugate prox clips coordinatewise") {
    ProxCapableFunction h = make_l1_norm();
    Vector w = prox_conjugate_scaled(h, 2.0, vec2(0.9, -0.2));
    CHECK(w[0] == Catch::Approx(0.9));
    CHECK(w[1] == Catch::Approx(-0.2));
    Rng rng(11);
    Vector z = rng.normal_vector(6) * 3.0;
    Vector clipped = prox_conjugate_scaled(h, 1.7, z);
    for (int i = 0; i < 6; ++i) {
        CHECK(clipped[i] == Catch::Approx(std::clamp(z[i], -1.0, 1.0)));
    }
}

TEST_CASE("moreau identity holds for every stock prox") {
    Rng rng(5);
    auto funcs = {make_indicator_zero(), make_indicator_nonpositive_orthant(),
                  make_euclidean_norm(), make_l1_norm()};
    for (const auto& h : funcs) {
        for (double ell : {0.5, 1.0, 3.0}) {
            Vector w = rng.normal_vector(5) * 2.0;
            Vector direct = prox_conjugate_scaled(h, ell, w);
            Vector via = w - h.prox(ell, Vector(ell * w)) / ell;
            CHECK((direct - via).norm() <= 1e-14);
        }
    }
}

TEST_CASE("penalty surrogate closed forms") {
    SECTION("equality constraint becomes a scaled norm") {
        ProxCapableFunction h = make_indicator_zero();
        CHECK(h_rho_value(h, {2.0}, vec2(3.0, 4.0)) == Catch::Approx(10.0));
        CHECK(h_rho_value(h, {1.0}, Vector::Zero(2)) == 0.0);
    }
    SECTION("inequality constraint penalizes the positive part") {
        ProxCapableFunction h = make_indicator_nonpositive_orthant();
        CHECK(h_rho_value(h, {2.0}, vec2(3.0, -4.0)) == Catch::Approx(6.0));
        CHECK(h_rho_value(h, {2.0}, vec2(-1.0, -4.0)) == 0.0);
    }
    SECTION("cone constraint penalizes the polar projection") {
        // K = nonnegative orthant, polar part of z is its negative piece
        ProxCapableFunction h = make_indicator_cone(
            [](const Vector& z) { return Vector(z.cwiseMax(0.0)); });
        CHECK(h_rho_value(h, {2.0}, vec2(1.0, -2.0)) == Catch::Approx(4.0));
        CHECK(h_rho_value(h, {2.0}, vec2(1.0, 2.0)) == 0.0);
    }
    SECTION("norms pass through once rho dominates their dual bound") {
        CHECK(h_rho_value(make_euclidean_norm(), {1.0}, vec2(2.0, 0.0)) ==
              Catch::Approx(2.0));
        CHECK(h_rho_value(make_l1_norm(), {std::sqrt(2.0)}, vec2(0.3, -0.2)) ==
              Catch::Approx(0.5));
    }
    SECTION("insufficient rho is rejected") {
        CHECK_THROWS_AS(h_rho_value(make_euclidean_norm(), {0.5}, vec2(1.0, 0.0)),
                        ParameterError);
        CHECK_THROWS_AS(h_rho_value(make_l1_norm(), {1.0}, vec2(1.0, 0.0)),
                        ParameterError);
        CHECK_THROWS_AS(h_rho_value(make_indicator_zero(), {0.0}, vec2(1.0, 0.0)),
                        ParameterError);
        CHECK_THROWS_AS(h_rho_value(make_indicator_zero(), {-1.0}, vec2(1.0, 0.0)),
                        ParameterError);
    }
    SECTION("unknown kinds are refused by name") {
        ProxCapableFunction h = make_indicator_zero();
        h.kind = ProxKind::custom;
        try {
            h_rho_value(h, {2.0}, vec2(1.0, 0.0));
            FAIL("expected UnsupportedProxError");
        } catch (const UnsupportedProxError& e) {
            CHECK(e.kind == "custom");
            CHECK(std::string(e.what()).find("custom") != std::string::npos);
        }
    }
}

TEST_CASE("cone indicator membership uses the projection") {
    ProxCapableFunction h = make_indicator_cone(
        [](const Vector& z) { return Vector(z.cwiseMax(0.0)); });
    CHECK(h.value(vec2(1.0, 2.0)) == 0.0);
    CHECK(h.value(vec2(1.0, -2.0)) == kInf);
    Vector p = h.prox(7.0, vec2(1.0, -2.0)); // prox ignores the step for indicators
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
    Vector polar = h.cone_polar_projection(vec2(1.0, -2.0));
    CHECK(polar[0] == 0.0);
    CHECK(polar[1] == -2.0);
}
