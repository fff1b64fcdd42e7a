#include "spml/solver.hpp"

#include "spml/spaces.hpp"

#include <Eigen/LU>

#include <cmath>

namespace spml {

Field drift_A(const Generator& gen, const Nonlinearity& psi, double nu,
              const Field& u) {
    if (nu < 0.0) throw std::invalid_argument("nu must be nonnegative");
    Field psi_u = apply_field(psi, u);
    return gen.apply(psi_u) - nu * psi_u;
}

double drift_pairing(const Generator& gen, const Nonlinearity& psi, double nu,
                     const Field& u, const Field& v) {
    Field psi_u = apply_field(psi, u);
    return -l2_inner(psi_u, v) +
           (1.0 - nu) * l2_inner(riesz_inverse(gen, psi_u), v);
}

double drift_dual_norm(const Generator& gen, const Nonlinearity& psi,
                       double nu, const Field& u) {
    // sup_{|v|_2 = 1} <Au, v> with the pairing above is the L2 norm of
    // -Psi(u) + (1-nu)(1-L)^{-1} Psi(u).
    Field psi_u = apply_field(psi, u);
    Field image = (1.0 - nu) * riesz_inverse(gen, psi_u) - psi_u;
    return l2_norm(image);
}

namespace {

Eigen::VectorXd implicit_residual(const Generator& gen,
                                  const Nonlinearity& psi,
                                  const CascadeConfig& cfg, const Field& y,
                                  const Field& rhs) {
    Field psi_y = apply_field(psi, y);
    Field shifted = gen.apply_multiplier(
        [&](double th) { return cfg.nu + th; },
        psi_y + cfg.lambda * y);  // (nu - L)(Psi(Y) + lambda Y)
    return y.values() + cfg.dt * shifted.values() - rhs.values();
}

double weighted_norm(const MeasureSpace& space, const Eigen::VectorXd& v) {
    return std::sqrt((v.array().square() * space.weights().array()).sum());
}

}  // namespace

Field implicit_step(const Generator& gen, const Nonlinearity& psi,
                    const CascadeConfig& cfg, const Field& rhs) {
    gen.require_bound(rhs);
    const MeasureSpace& space = *gen.space();
    const double tol = cfg.newton_tol * std::max(1.0, weighted_norm(space, rhs.values()));

    Field y = rhs;  // dt -> 0 limit; decent start since dt is small
    Eigen::VectorXd residual = implicit_residual(gen, psi, cfg, y, rhs);
    double res_norm = weighted_norm(space, residual);

    Eigen::MatrixXd shift_op = gen.multiplier_matrix(
        [&](double th) { return cfg.nu + th; });

    for (int iter = 0; iter < cfg.newton_max; ++iter) {
        if (res_norm <= tol) return y;

        Eigen::VectorXd d_psi(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i)
            d_psi[i] = psi.deriv(y[i]) + cfg.lambda;
        Eigen::MatrixXd jac =
            Eigen::MatrixXd::Identity(y.size(), y.size()) +
            cfg.dt * shift_op * d_psi.asDiagonal().toDenseMatrix();
        Eigen::VectorXd direction = jac.partialPivLu().solve(residual);

        // Damp by halving until the residual actually decreases.
        double step = 1.0;
        for (int halving = 0; halving < 60; ++halving) {
            Field candidate = y.with_values(y.values() - step * direction);
            Eigen::VectorXd cand_res =
                implicit_residual(gen, psi, cfg, candidate, rhs);
            double cand_norm = weighted_norm(space, cand_res);
            if (cand_norm < res_norm || cand_norm <= tol) {
                y = candidate;
                residual = std::move(cand_res);
                res_norm = cand_norm;
                break;
            }
            step *= 0.5;
            if (halving == 59)
                throw SolverError("newton line search stalled", -1, iter,
                                  res_norm);
        }
    }
    if (res_norm <= tol) return y;
    throw SolverError("newton failed to reach tolerance", -1, cfg.newton_max,
                      res_norm);
}

Trajectory simulate(const Generator& gen, const Nonlinearity& psi,
                    const NoiseOperator& B, const WienerSpec& wiener,
                    const CascadeConfig& cfg, const Field& x, int path) {
    cfg.validate();
    gen.require_bound(x);
    if (!B.g.empty() && wiener.modes != B.modes())
        throw std::invalid_argument("wiener spec modes do not match noise operator");

    const int n_steps = cfg.steps();
    Trajectory traj;
    traj.seed = wiener.seed;
    traj.path = path;
    traj.times.reserve(n_steps + 1);
    traj.states.reserve(n_steps + 1);

    auto record = [&](double t, const Field& state) {
        traj.times.push_back(t);
        traj.l2_trace.push_back(l2_norm(state));
        traj.f12dual_trace.push_back(norm(gen, state, NormKind::f12_dual()));
        traj.f12_trace.push_back(norm(gen, state, NormKind::f12()));
        traj.psi_l2_trace.push_back(l2_norm(apply_field(psi, state)));
        traj.states.push_back(state);
    };

    record(0.0, x);
    Field current = x;
    for (int n = 0; n < n_steps; ++n) {
        double t = n * cfg.dt;
        Field rhs = current;
        if (!B.g.empty()) {
            Eigen::VectorXd dw =
                wiener.increment(static_cast<std::uint64_t>(path),
                                 static_cast<std::uint64_t>(n));
            rhs = rhs + diffuse(gen, B, t, current, dw);
        }
        try {
            current = implicit_step(gen, psi, cfg, rhs);
        } catch (const SolverError& err) {
            throw SolverError(err.what(), n, err.iterations, err.residual);
        }
        record((n + 1) * cfg.dt, current);
    }
    return traj;
}

IntegratedPsi integrated_psi(const Trajectory& traj, const Generator& gen,
                             const Nonlinearity& psi, const NoiseOperator& B,
                             const WienerSpec& wiener,
                             const CascadeConfig& cfg) {
    if (traj.states.empty())
        throw std::invalid_argument("trajectory is incomplete");
    IntegratedPsi out;
    const Field& x = traj.states.front();
    Field cumulative = Field::zero(x.space());
    Field noise_sum = Field::zero(x.space());

    out.cumulative.push_back(cumulative);
    out.f12_trace.push_back(0.0);
    out.equation_residual.push_back(0.0);

    for (std::size_t n = 1; n < traj.states.size(); ++n) {
        // The implicit scheme integrates Psi at the solved states, so the
        // quadrature uses X_1..X_n; this keeps the discrete equation
        // residual at Newton-tolerance level.
        cumulative = cumulative + cfg.dt * apply_field(psi, traj.states[n]);
        out.cumulative.push_back(cumulative);
        out.f12_trace.push_back(norm(gen, cumulative, NormKind::f12()));

        if (!B.g.empty()) {
            double t = (n - 1) * cfg.dt;
            Eigen::VectorXd dw =
                wiener.increment(static_cast<std::uint64_t>(traj.path),
                                 static_cast<std::uint64_t>(n - 1));
            noise_sum = noise_sum + diffuse(gen, B, t, traj.states[n - 1], dw);
        }

        // X_n + (nu - L) [int Psi + lambda int X] - x - int B dW.
        Field lambda_integral = Field::zero(x.space());
        if (cfg.lambda > 0.0) {
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(x.size());
            for (std::size_t m = 1; m <= n; ++m)
                acc += cfg.dt * traj.states[m].values();
            lambda_integral = Field(x.space(), cfg.lambda * acc);
        }
        Field shifted = gen.apply_multiplier(
            [&](double th) { return cfg.nu + th; },
            cumulative + lambda_integral);
        Field residual = traj.states[n] + shifted - x - noise_sum;
        out.equation_residual.push_back(
            norm(gen, residual, NormKind::f12_dual()));
    }
    return out;
}

}  // namespace spml
