#pragma once

#include "spml/field.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace spml {

/// Scalar monotone nondecreasing Lipschitz map with Psi(0) = 0, applied
/// pointwise inside the diffusion operator. `deriv` is the right
/// derivative, consumed only by the Newton solver.
struct Nonlinearity {
    std::string name;
    std::function<double(double)> eval;
    std::function<double(double)> deriv;
    double lipschitz = 1.0;
    /// Present iff Psi(r) r >= c r^2 is claimed (the strong-coercivity flag).
    std::optional<double> coercivity;
};

/// alpha_tilde = (Lip Psi + 1)^{-1}, the constant in the monotonicity
/// inequality (Psi(r) - Psi(r'))(r - r') >= alpha_tilde |Psi(r) - Psi(r')|^2.
double alpha_tilde(const Nonlinearity& psi);

Field apply_field(const Nonlinearity& psi, const Field& u);

struct H1Report {
    double psi_zero_residual = 0.0;
    double max_monotonicity_violation = 0.0;
    double measured_lipschitz = 0.0;
    double measured_coercivity = 0.0;  // inf Psi(r) r / r^2 over the grid
    bool monotone = false;
    bool lipschitz_ok = false;
    bool pass = false;
};

/// Samples the monotone-Lipschitz requirements on a grid (must contain 0);
/// failures are
/// report entries, never exceptions.
H1Report check_h1(const Nonlinearity& psi, const std::vector<double>& grid);

/// A symmetric grid {-lo..hi} with `count` points plus 0, for check_h1.
std::vector<double> sampling_grid(double radius, int count);

// Catalog.
Nonlinearity identity_psi();
Nonlinearity linear_psi(double c);
/// Psi(r) = clamp(r, -1, 1); monotone Lipschitz but not strongly coercive.
Nonlinearity saturation_psi();
/// Psi(r) = sign(r) max(|r|-1, 0); monotone Lipschitz, not strongly coercive.
Nonlinearity dead_zone_psi();
/// Piecewise-linear regularization of sign(r)|r|^m, valid on [-rmax, rmax];
/// outside, the boundary slope continues (keeps the map globally Lipschitz).
Nonlinearity regularized_porous_medium_psi(double m, double rmax,
                                           int segments = 64);
/// User-supplied piecewise-linear table of (r, Psi(r)) breakpoints; slopes
/// outside the table clamp to the boundary slopes. Throws on tables that
/// are not monotone or miss Psi(0) = 0.
Nonlinearity breakpoint_psi(const std::vector<std::pair<double, double>>& table);

/// All shipped catalog members with defaults used in studies/tests.
std::vector<Nonlinearity> catalog();

}  // namespace spml
