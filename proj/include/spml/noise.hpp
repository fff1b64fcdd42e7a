#pragma once

#include "spml/field.hpp"
#include "spml/generator.hpp"

#include <cstdint>
#include <vector>

namespace spml {

/// Counter-based standard normal variate keyed by (seed, path, mode, step).
/// Order-independent, so concurrent path workers draw identical streams.
double normal_variate(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t mode, std::uint64_t step);

/// Truncated cylindrical Wiener driver: K modes along the generator
/// eigenbasis. `aggregate` > 1 sums that many fine increments of size
/// dt/aggregate per coarse step, so dyadic refinements stay coupled to
/// one underlying path.
struct WienerSpec {
    int modes = 1;
    std::uint64_t seed = 0;
    double dt = 1e-3;
    int aggregate = 1;

    /// One increment vector Delta W_n (one entry per mode), N(0, dt) i.i.d.
    Eigen::VectorXd increment(std::uint64_t path, std::uint64_t step) const;
};

/// Bounded deterministic time coefficient g_k(t).
struct TimeCoefficient {
    enum class Kind { Const, Sin };
    Kind kind = Kind::Const;
    double value = 1.0;
    double period = 1.0;  // Sin: g(t) = value * (1 + sin(2 pi t / period) / 2)

    double operator()(double t) const;
    double sup_abs() const;
};

/// Spectral multiplier gamma_k(theta) defining Gamma_k = gamma_k(L).
struct SpectralMultiplier {
    enum class Kind { One, Resolvent };
    Kind kind = Kind::One;
    double power = 1.0;  // Resolvent: gamma(theta) = (1 + theta)^{-power}

    double operator()(double theta) const;
};

/// Linear multiplicative noise operator B(t,u) h = sum_k g_k(t) <h, e_k>_2
/// Gamma_k u, mapping L2(mu) -> F*_{1,2}. Linearity in u gives both growth
/// bounds with C1 = C2 = sup_t sum_k g_k(t)^2 ||Gamma_k||^2_{op, F*}.
struct NoiseOperator {
    std::vector<TimeCoefficient> g;
    std::vector<SpectralMultiplier> gamma;

    int modes() const { return static_cast<int>(g.size()); }
    bool is_zero() const;

    /// Claimed growth constants, from per-mode sups of g and the exact
    /// operator norm of each multiplier on the generator's spectrum.
    double c1(const Generator& gen) const { return c2(gen); }
    double c2(const Generator& gen) const;

    static NoiseOperator zero();
    static NoiseOperator rank_one(double g0);
    static NoiseOperator smoothing(double g0, double power = 1.0);
};

/// Squared Hilbert-Schmidt norm of B(t,u) in L2(L2(mu), F*_{1,2}):
/// sum_k g_k(t)^2 ||Gamma_k u||^2_{F*}.
double hs_norm_sq(const Generator& gen, const NoiseOperator& B, double t,
                  const Field& u);

/// One Euler increment B(t, u) Delta W = sum_k g_k(t) dW_k Gamma_k u.
Field diffuse(const Generator& gen, const NoiseOperator& B, double t,
              const Field& u, const Eigen::VectorXd& dW);

struct H2Report {
    double claimed_c1 = 0.0, claimed_c2 = 0.0;
    double measured_c1 = 0.0, measured_c2 = 0.0;
    int samples = 0;
    bool pass = false;
};

/// Measures the noise-growth ratios on random field pairs and checks them
/// against
/// the claimed constants.
H2Report verify_h2(const Generator& gen, const NoiseOperator& B, int samples,
                   std::uint64_t seed = 42, double horizon = 1.0);

/// Random field with i.i.d. standard normal coefficients in the eigenbasis.
Field random_field(const Generator& gen, std::uint64_t seed,
                   std::uint64_t index);

}  // namespace spml
