#pragma once

#include "spml/field.hpp"
#include "spml/measure_space.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace spml {

/// Jump conductances and per-site killing rates defining a discrete
/// Dirichlet form on a measure space.
struct ConductanceGraph {
    SpacePtr space;
    Eigen::MatrixXd conductances;  // symmetric, nonnegative, zero diagonal
    Eigen::VectorXd killing;       // nonnegative

    void validate() const;
};

enum class GeneratorKind { Conductance, WeightedDensity, Fractional, Custom };

/// Self-adjoint negative-semidefinite operator on L2(mu), stored as a
/// spectral decomposition L = sum_k (-theta_k) <., phi_k>_2 phi_k with
/// the phi_k orthonormal in the mu-weighted inner product.
class Generator {
public:
    Generator(SpacePtr space, Eigen::VectorXd thetas, Eigen::MatrixXd basis,
              GeneratorKind kind);

    const SpacePtr& space() const { return space_; }
    Eigen::Index size() const { return thetas_.size(); }
    GeneratorKind kind() const { return kind_; }

    /// theta_k >= 0; the eigenvalues of L are -theta_k, ascending theta.
    const Eigen::VectorXd& thetas() const { return thetas_; }
    /// Columns phi_k, orthonormal in L2(mu).
    const Eigen::MatrixXd& eigenbasis() const { return basis_; }
    Field eigenfunction(Eigen::Index k) const {
        return Field(space_, basis_.col(k));
    }

    /// Coefficients u_hat_k = <u, phi_k>_2.
    Eigen::VectorXd to_spectral(const Eigen::VectorXd& u) const;
    Eigen::VectorXd from_spectral(const Eigen::VectorXd& coeffs) const;

    /// Applies the spectral multiplier m(theta) to a field.
    Field apply_multiplier(const std::function<double(double)>& m,
                           const Field& u) const;
    /// Dense site-coordinate matrix of the multiplier m(theta).
    Eigen::MatrixXd multiplier_matrix(
        const std::function<double(double)>& m) const;

    /// L u, spectrally.
    Field apply(const Field& u) const;

    void require_bound(const Field& u) const;

private:
    SpacePtr space_;
    Eigen::VectorXd thetas_;
    Eigen::MatrixXd basis_;
    GeneratorKind kind_;
};

/// Eigendecomposes the operator (Lu)_i = mu_i^{-1} [sum_j c_ij (u_j - u_i)
/// - k_i u_i] arising from the form E(u,v) = sum_{i<j} c_ij (u_i-u_j)(v_i-v_j)
/// + sum_i k_i u_i v_i.
Generator build_conductance_generator(const ConductanceGraph& graph);

/// 1D grid with spacing h and positive density rho; mu_i = rho_i^2 h and
/// edge conductances rho_edge^2 / h^2 with rho_edge^2 = (rho_i^2 + rho_{i+1}^2)/2.
/// Reduces to the Neumann graph Laplacian for rho == 1, h == 1.
Generator build_weighted_generator(Eigen::Index n, double h,
                                   const Eigen::VectorXd& density);

/// Spectral map theta_k -> theta_k^alpha, alpha in (0,1].
Generator fractional_power(const Generator& gen, double alpha);

/// P_t u = e^{tL} u.
Field semigroup_apply(const Generator& gen, double t, const Field& u);

enum class ResolventPower { Full, Half };  // s = 1 or s = 1/2

/// (alpha - L)^{-s} u for alpha > 0.
Field resolvent_apply(const Generator& gen, double alpha, const Field& u,
                      ResolventPower power = ResolventPower::Full);

/// Result of the gamma transform V_r computed along both routes.
struct GammaTransformResult {
    Field spectral;    // (1+theta)^{-r/2} per mode
    Field quadrature;  // trapezoid rule on the subordination integral
};

/// V_r f = Gamma(r/2)^{-1} int_0^inf s^{r/2-1} e^{-s} P_s f ds.
/// The spectral route is the returned value; the quadrature route is the
/// independent cross-check.
GammaTransformResult gamma_transform(const Generator& gen, double r,
                                     const Field& f);

/// Convenience builders used throughout the tests.
ConductanceGraph path_graph(Eigen::Index n, double conductance = 1.0,
                            double weight = 1.0);
ConductanceGraph two_point_graph();

}  // namespace spml
