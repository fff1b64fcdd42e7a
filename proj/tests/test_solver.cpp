#include "spml/solver.hpp"
#include "spml/spaces.hpp"

#include <doctest.h>

#include <cmath>

using namespace spml;

namespace {

Generator path8() { return build_conductance_generator(path_graph(8)); }

double weighted_norm(const Field& f) { return l2_norm(f); }

// Damped fixed-point oracle for Y + dt (nu - L)(Psi(Y) + lambda Y) = R.
// Slow but independent of the Newton solver under test.
Field picard_oracle(const Generator& gen, const Nonlinearity& psi,
                    const CascadeConfig& cfg, const Field& rhs) {
    Field y = rhs;
    const double omega = 0.05;
    for (int iter = 0; iter < 200000; ++iter) {
        Field shifted = gen.apply_multiplier(
            [&](double th) { return cfg.nu + th; },
            apply_field(psi, y) + cfg.lambda * y);
        Field residual = y + cfg.dt * shifted - rhs;
        if (weighted_norm(residual) <= 1e-11) break;
        y = y - omega * residual;
    }
    return y;
}

}  // namespace

TEST_CASE("implicit step solves the linear problem in closed form") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.nu = 0.3;
    cfg.lambda = 0.2;
    cfg.dt = 0.05;
    Nonlinearity psi = linear_psi(0.5);
    Field rhs = random_field(gen, 41, 0);
    Field y = implicit_step(gen, psi, cfg, rhs);
    Field exact = gen.apply_multiplier(
        [&](double th) {
            return 1.0 / (1.0 + cfg.dt * (cfg.nu + th) * (0.5 + cfg.lambda));
        },
        rhs);
    CHECK((y.values() - exact.values()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("implicit step agrees with a damped fixed-point oracle") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.dt = 0.05;
    cfg.lambda = 0.1;
    Nonlinearity psi = saturation_psi();
    for (int i = 0; i < 5; ++i) {
        Field rhs = random_field(gen, 42, i);
        Field newton = implicit_step(gen, psi, cfg, rhs);
        Field picard = picard_oracle(gen, psi, cfg, rhs);
        CHECK((newton.values() - picard.values()).cwiseAbs().maxCoeff() <=
              1e-6);
    }
}

TEST_CASE("implicit step meets its residual contract") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.dt = 0.1;
    for (const Nonlinearity& psi : catalog()) {
        CAPTURE(psi.name);
        Field rhs = 10.0 * random_field(gen, 43, 0);
        Field y = implicit_step(gen, psi, cfg, rhs);
        Field shifted = gen.apply_multiplier(
            [&](double th) { return cfg.nu + th; },
            apply_field(psi, y) + cfg.lambda * y);
        double res = weighted_norm(y + cfg.dt * shifted - rhs);
        CHECK(res <= cfg.newton_tol * std::max(1.0, weighted_norm(rhs)));
    }
}

TEST_CASE("a misleading derivative surfaces as a solver error with its step") {
    Generator gen = path8();
    Nonlinearity bad{"bad", [](double r) { return r; },
                     [](double) { return -1e6; }, 1.0, std::nullopt};
    CascadeConfig cfg;
    cfg.dt = 0.5;
    Field x = random_field(gen, 44, 0);
    WienerSpec wiener{1, 0, cfg.dt, 1};
    try {
        simulate(gen, bad, NoiseOperator::zero(), wiener, cfg, x, 0);
        FAIL("expected a solver error");
    } catch (const SolverError& err) {
        CHECK(err.step >= 0);
        CHECK(err.residual > 0.0);
    }
}

TEST_CASE("drift pairing matches the represented functional") {
    Generator gen = path8();
    Nonlinearity psi = saturation_psi();
    const double nu = 0.4;
    Field u = random_field(gen, 45, 0);
    Field v = random_field(gen, 45, 1);
    CHECK(drift_pairing(gen, psi, nu, u, v) ==
          doctest::Approx(dual_pairing(gen, drift_A(gen, psi, nu, u), v))
              .epsilon(1e-10));
}

TEST_CASE("drift dual norm dominates the pairing over unit directions") {
    Generator gen = path8();
    Nonlinearity psi = saturation_psi();
    const double nu = 0.2;
    Field u = random_field(gen, 46, 0);
    double dual = drift_dual_norm(gen, psi, nu, u);
    double best = 0.0;
    for (int i = 0; i < 200; ++i) {
        Field v = random_field(gen, 46, 100 + i);
        double vn = l2_norm(v);
        if (vn == 0.0) continue;
        best = std::max(best,
                        std::abs(drift_pairing(gen, psi, nu, u, v)) / vn);
    }
    CHECK(best <= dual + 1e-10);
    CHECK(dual <= best * 2.0 + 1e-10);  // the sup is nearly attained
}

TEST_CASE("deterministic monotone dynamics dissipate the weighted norm") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.dt = 1e-2;
    cfg.horizon = 0.5;
    WienerSpec wiener{1, 0, cfg.dt, 1};
    Field x = 2.0 * random_field(gen, 47, 0);
    for (const Nonlinearity& psi : catalog()) {
        CAPTURE(psi.name);
        Trajectory traj =
            simulate(gen, psi, NoiseOperator::zero(), wiener, cfg, x, 0);
        for (std::size_t n = 1; n < traj.l2_trace.size(); ++n)
            CHECK(traj.l2_trace[n] <= traj.l2_trace[n - 1] + 1e-12);
    }
}

TEST_CASE("zero horizon records exactly the initial state") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.dt = 1e-2;
    cfg.horizon = 0.0;
    WienerSpec wiener{1, 0, cfg.dt, 1};
    Field x = random_field(gen, 48, 0);
    Trajectory traj = simulate(gen, identity_psi(), NoiseOperator::zero(),
                               wiener, cfg, x, 0);
    REQUIRE(traj.states.size() == 1);
    CHECK((traj.states[0].values() - x.values()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.times[0] == 0.0);
}

TEST_CASE("trajectory traces match recomputed norms") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.dt = 1e-2;
    cfg.horizon = 0.1;
    Nonlinearity psi = saturation_psi();
    NoiseOperator B = NoiseOperator::rank_one(0.5);
    WienerSpec wiener{1, 7, cfg.dt, 1};
    Field x = random_field(gen, 49, 0);
    Trajectory traj = simulate(gen, psi, B, wiener, cfg, x, 2);
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
        CHECK(traj.l2_trace[n] == doctest::Approx(l2_norm(traj.states[n])));
        CHECK(traj.f12dual_trace[n] ==
              doctest::Approx(norm(gen, traj.states[n], NormKind::f12_dual())));
        CHECK(traj.f12_trace[n] ==
              doctest::Approx(norm(gen, traj.states[n], NormKind::f12())));
        CHECK(traj.psi_l2_trace[n] ==
              doctest::Approx(l2_norm(apply_field(psi, traj.states[n]))));
    }
}

TEST_CASE("integrated nonlinearity satisfies the discrete equation") {
    Generator gen = path8();
    CascadeConfig cfg;
    cfg.dt = 1e-2;
    cfg.horizon = 0.2;
    cfg.lambda = 0.3;
    cfg.nu = 0.1;
    Nonlinearity psi = saturation_psi();
    NoiseOperator B = NoiseOperator::rank_one(0.5);
    WienerSpec wiener{1, 11, cfg.dt, 1};
    Field x = random_field(gen, 50, 0);
    Trajectory traj = simulate(gen, psi, B, wiener, cfg, x, 0);
    IntegratedPsi integrated = integrated_psi(traj, gen, psi, B, wiener, cfg);
    REQUIRE(integrated.equation_residual.size() == traj.states.size());
    for (double r : integrated.equation_residual) CHECK(r <= 1e-7);
    // Cumulative sum recomputed independently at the endpoint.
    Field manual = Field::zero(gen.space());
    for (std::size_t n = 1; n < traj.states.size(); ++n)
        manual = manual + cfg.dt * apply_field(psi, traj.states[n]);
    CHECK((integrated.cumulative.back().values() - manual.values())
              .cwiseAbs()
              .maxCoeff() <= 1e-12);
}

TEST_CASE("cascade configuration validation") {
    CascadeConfig cfg;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CascadeConfig{};
    cfg.horizon = -0.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CascadeConfig{};
    cfg.nu = -0.1;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CascadeConfig{};
    cfg.horizon = 0.0;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.steps() == 0);
}
