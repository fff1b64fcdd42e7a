#pragma once

#include "spml/field.hpp"
#include "spml/generator.hpp"
#include "spml/noise.hpp"
#include "spml/nonlinearity.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace spml {

/// Inputs for one level of the approximation cascade
/// dX + (nu - L)(Psi(X) + lambda X) dt = B(t, X) dW; nu = lambda = 0 is the
/// target equation.
struct CascadeConfig {
    double nu = 0.0;
    double lambda = 0.0;
    double dt = 1e-3;
    double horizon = 1.0;
    double newton_tol = 1e-10;
    int newton_max = 50;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
        if (horizon < 0.0) throw std::invalid_argument("T must be nonnegative");
        if (!(newton_tol > 0.0))
            throw std::invalid_argument("newton_tol must be positive");
        if (newton_max < 1)
            throw std::invalid_argument("newton_max must be positive");
        if (nu < 0.0 || lambda < 0.0)
            throw std::invalid_argument("nu and lambda must be nonnegative");
    }

    int steps() const {
        return static_cast<int>(std::llround(horizon / dt));
    }
};

struct SolverError : std::runtime_error {
    SolverError(const std::string& what, int step, int iterations,
                double residual)
        : std::runtime_error(what),
          step(step),
          iterations(iterations),
          residual(residual) {}
    int step;
    int iterations;
    double residual;
};

/// Recorded path: states on the time grid plus the norm traces the
/// estimates are phrased in.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<double> l2_trace;
    std::vector<double> f12dual_trace;
    std::vector<double> f12_trace;
    std::vector<double> psi_l2_trace;
    std::uint64_t seed = 0;
    int path = 0;
};

/// A u = (L - nu) Psi(u).
Field drift_A(const Generator& gen, const Nonlinearity& psi, double nu,
              const Field& u);

/// <A u, v>_{V* x V} via the decomposition
/// -<Psi(u), v>_2 + (1 - nu) <(1-L)^{-1} Psi(u), v>_2.
double drift_pairing(const Generator& gen, const Nonlinearity& psi, double nu,
                     const Field& u, const Field& v);

/// |A u|_{V*} via the supremum characterization (spectral image of
/// (1-L)^{-1} A u in L2(mu)).
double drift_dual_norm(const Generator& gen, const Nonlinearity& psi,
                       double nu, const Field& u);

/// Solves Y + dt (nu - L)(Psi(Y) + lambda Y) = R by damped Newton; the
/// residual contract is ||F(Y)||_2 <= newton_tol * max(1, ||R||_2).
Field implicit_step(const Generator& gen, const Nonlinearity& psi,
                    const CascadeConfig& cfg, const Field& rhs);

/// Semi-implicit Euler-Maruyama over the full grid: drift implicit, noise
/// explicit. Deterministic function of (seed, path).
Trajectory simulate(const Generator& gen, const Nonlinearity& psi,
                    const NoiseOperator& B, const WienerSpec& wiener,
                    const CascadeConfig& cfg, const Field& x, int path);

/// Cumulative left-sum Delta t * sum Psi(X_m) over solved states with the
/// F_{1,2} norm trace, plus the accumulated residual of the integrated
/// equation X_n + (nu-L) int (Psi + lambda id) - x - int B dW in F*_{1,2}.
struct IntegratedPsi {
    std::vector<Field> cumulative;
    std::vector<double> f12_trace;
    std::vector<double> equation_residual;  // per grid point, F* norm
};
IntegratedPsi integrated_psi(const Trajectory& traj, const Generator& gen,
                             const Nonlinearity& psi, const NoiseOperator& B,
                             const WienerSpec& wiener,
                             const CascadeConfig& cfg);

}  // namespace spml
