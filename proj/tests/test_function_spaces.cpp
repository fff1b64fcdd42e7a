#include "spml/noise.hpp"
#include "spml/spaces.hpp"

#include <doctest.h>

#include <cmath>

using namespace spml;

namespace {

Generator path8() { return build_conductance_generator(path_graph(8)); }

}  // namespace

TEST_CASE("two-point norms match their closed forms") {
    Generator gen = build_conductance_generator(two_point_graph());
    // thetas are {0, 2}; build u with prescribed spectral coefficients.
    const double a = 0.7, b = -1.3;
    Eigen::VectorXd coeffs(2);
    coeffs << a, b;
    Field u(gen.space(), gen.from_spectral(coeffs));

    CHECK(std::pow(norm(gen, u, NormKind::l2()), 2) ==
          doctest::Approx(a * a + b * b).epsilon(1e-12));
    CHECK(std::pow(norm(gen, u, NormKind::f12()), 2) ==
          doctest::Approx(a * a + 3.0 * b * b).epsilon(1e-12));
    CHECK(std::pow(norm(gen, u, NormKind::f12_dual()), 2) ==
          doctest::Approx(a * a + b * b / 3.0).epsilon(1e-12));
    CHECK(std::pow(norm(gen, u, NormKind::f12_dual_nu(0.5)), 2) ==
          doctest::Approx(a * a / 0.5 + b * b / 2.5).epsilon(1e-12));
}

TEST_CASE("nu-weighted dual norm with nu = 1 is the plain dual norm") {
    Generator gen = path8();
    Field u = random_field(gen, 21, 0);
    CHECK(norm(gen, u, NormKind::f12_dual_nu(1.0)) ==
          doctest::Approx(norm(gen, u, NormKind::f12_dual())).epsilon(1e-13));
    CHECK_THROWS_AS(NormKind::f12_dual_nu(0.0), std::invalid_argument);
}

TEST_CASE("pairing polarizes the norm") {
    Generator gen = path8();
    Field u = random_field(gen, 22, 0);
    Field v = random_field(gen, 22, 1);
    for (NormKind kind : {NormKind::l2(), NormKind::f12(),
                          NormKind::f12_dual(), NormKind::f12_dual_nu(0.3)}) {
        double polarized = 0.25 * (std::pow(norm(gen, u + v, kind), 2) -
                                   std::pow(norm(gen, u - v, kind), 2));
        CHECK(pairing(gen, u, v, kind) ==
              doctest::Approx(polarized).epsilon(1e-10));
    }
}

TEST_CASE("riesz map is an isometry onto the dual") {
    for (Generator gen :
         {path8(), fractional_power(
                       build_conductance_generator(path_graph(16)), 0.5)}) {
        for (int i = 0; i < 100; ++i) {
            Field u = random_field(gen, 23, i);
            double f12 = norm(gen, u, NormKind::f12());
            double dual =
                norm(gen, riesz_forward(gen, u), NormKind::f12_dual());
            CHECK(std::abs(dual - f12) <= 1e-10 * std::max(1.0, f12));
            Field round = riesz_inverse(gen, riesz_forward(gen, u));
            CHECK((round.values() - u.values()).cwiseAbs().maxCoeff() <=
                  1e-10);
        }
    }
}

TEST_CASE("duality pairing represents the weighted inner product") {
    Generator gen = path8();
    Field u = random_field(gen, 24, 0);
    Field v = random_field(gen, 24, 1);
    // <(1-L)u, v>_{V* x V} = <u, v>_2.
    CHECK(dual_pairing(gen, riesz_forward(gen, u), v) ==
          doctest::Approx(l2_inner(u, v)).epsilon(1e-11));
    // For w in L2 the pairing is the F* inner product.
    CHECK(dual_pairing(gen, u, v) ==
          doctest::Approx(pairing(gen, u, v, NormKind::f12_dual()))
              .epsilon(1e-11));
}

TEST_CASE("duality probe reproduces the weighted norm") {
    Generator gen = path8();
    for (int i = 0; i < 50; ++i) {
        Field u = random_field(gen, 25, i);
        IsometryReport report = l2_isometry_check(gen, u);
        CHECK(report.gap <= 1e-10 * std::max(1.0, report.l2_norm));
    }
    IsometryReport zero = l2_isometry_check(gen, Field::zero(gen.space()));
    CHECK(zero.gap == 0.0);
}

TEST_CASE("norm ordering of the triple") {
    Generator gen = path8();
    for (int i = 0; i < 20; ++i) {
        Field u = random_field(gen, 26, i);
        CHECK(norm(gen, u, NormKind::f12_dual()) <=
              norm(gen, u, NormKind::l2()) + 1e-12);
        CHECK(norm(gen, u, NormKind::l2()) <=
              norm(gen, u, NormKind::f12()) + 1e-12);
    }
}
