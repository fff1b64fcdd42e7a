#include "spml/nonlinearity.hpp"

#include <doctest.h>

#include <cmath>

using namespace spml;

TEST_CASE("catalog members satisfy the monotone Lipschitz requirements") {
    for (const Nonlinearity& psi : catalog()) {
        CAPTURE(psi.name);
        H1Report report = check_h1(psi, sampling_grid(5.0, 201));
        CHECK(report.pass);
        CHECK(report.measured_lipschitz <= psi.lipschitz + 1e-9);
        if (psi.coercivity)
            CHECK(report.measured_coercivity >= *psi.coercivity - 1e-9);
    }
}

TEST_CASE("alpha_tilde is the reciprocal of Lipschitz plus one") {
    CHECK(alpha_tilde(identity_psi()) == doctest::Approx(0.5));
    CHECK(alpha_tilde(linear_psi(0.5)) == doctest::Approx(1.0 / 1.5));
    CHECK(alpha_tilde(saturation_psi()) == doctest::Approx(0.5));
}

TEST_CASE("monotonicity lower bound holds on sampled pairs") {
    // (Psi(r) - Psi(r'))(r - r') >= alpha_tilde |Psi(r) - Psi(r')|^2.
    for (const Nonlinearity& psi : catalog()) {
        CAPTURE(psi.name);
        double at = alpha_tilde(psi);
        auto grid = sampling_grid(4.0, 101);
        for (double r : grid)
            for (double rp : grid) {
                double dpsi = psi.eval(r) - psi.eval(rp);
                CHECK(dpsi * (r - rp) >= at * dpsi * dpsi - 1e-12);
            }
    }
}

TEST_CASE("saturation and dead zone have the expected shape") {
    Nonlinearity sat = saturation_psi();
    CHECK(sat.eval(2.0) == 1.0);
    CHECK(sat.eval(-3.0) == -1.0);
    CHECK(sat.eval(0.4) == 0.4);
    CHECK(sat.deriv(0.0) == 1.0);
    CHECK(sat.deriv(2.0) == 0.0);
    CHECK_FALSE(sat.coercivity.has_value());

    Nonlinearity dz = dead_zone_psi();
    CHECK(dz.eval(0.5) == 0.0);
    CHECK(dz.eval(2.0) == 1.0);
    CHECK(dz.eval(-2.0) == -1.0);
    CHECK_FALSE(dz.coercivity.has_value());
}

TEST_CASE("regularized porous medium tracks the odd power inside its range") {
    const double m = 2.0, rmax = 2.0;
    Nonlinearity psi = regularized_porous_medium_psi(m, rmax);
    for (double r = -rmax; r <= rmax; r += 0.07) {
        double exact = r >= 0.0 ? std::pow(r, m) : -std::pow(-r, m);
        CHECK(std::abs(psi.eval(r) - exact) <= 1e-3);
    }
    // Outside the table the boundary slope continues, so it stays Lipschitz.
    double slope = (psi.eval(5.0) - psi.eval(4.0)) / 1.0;
    CHECK(slope <= psi.lipschitz + 1e-12);
    CHECK(check_h1(psi, sampling_grid(10.0, 301)).pass);
}

TEST_CASE("breakpoint tables are lenient to load, strict to verify") {
    // Strictly increasing abscissae are structural; everything else is a
    // reported check outcome.
    CHECK_THROWS_AS(breakpoint_psi({{0.0, 0.0}, {0.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(breakpoint_psi({{1.0, 1.0}}), std::invalid_argument);

    Nonlinearity good = breakpoint_psi({{-1.0, -2.0}, {0.0, 0.0}, {1.0, 2.0}});
    CHECK(check_h1(good, sampling_grid(3.0, 101)).pass);
    CHECK(good.lipschitz == doctest::Approx(2.0));

    Nonlinearity decreasing =
        breakpoint_psi({{-1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}});
    H1Report bad = check_h1(decreasing, sampling_grid(3.0, 101));
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.monotone);

    Nonlinearity offset = breakpoint_psi({{-1.0, -0.5}, {1.0, 1.5}});
    H1Report shifted = check_h1(offset, sampling_grid(3.0, 101));
    CHECK_FALSE(shifted.pass);
    CHECK(shifted.psi_zero_residual == doctest::Approx(0.5));
}

TEST_CASE("sampling grid is symmetric and contains zero") {
    auto grid = sampling_grid(3.0, 7);
    CHECK(grid.front() == doctest::Approx(-3.0));
    CHECK(grid[6] == doctest::Approx(3.0));
    bool has_zero = false;
    for (double r : grid) has_zero = has_zero || r == 0.0;
    CHECK(has_zero);
    CHECK_THROWS_AS(check_h1(identity_psi(), {1.0, 2.0}),
                    std::invalid_argument);
}
