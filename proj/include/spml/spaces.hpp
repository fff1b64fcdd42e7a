#pragma once

#include "spml/field.hpp"
#include "spml/generator.hpp"

namespace spml {

/// Which norm of the Gelfand triple L2(mu) c F*_{1,2} c (L2(mu))* to read a
/// field in. F12DualNu is the nu-weighted equivalent dual norm
/// <u, (nu - L)^{-1} u>^{1/2}.
struct NormKind {
    enum class Tag { L2, F12, F12Dual, F12DualNu };
    Tag tag = Tag::L2;
    double nu = 1.0;  // only read for F12DualNu

    static NormKind l2() { return {Tag::L2, 1.0}; }
    static NormKind f12() { return {Tag::F12, 1.0}; }
    static NormKind f12_dual() { return {Tag::F12Dual, 1.0}; }
    static NormKind f12_dual_nu(double nu);
};

/// Spectral norms: |u|_2, ||u||_{F12}^2 = sum (1+theta) u_hat^2,
/// ||u||_{F12*}^2 = sum (1+theta)^{-1} u_hat^2, and the nu variant with
/// (nu+theta)^{-1} weights.
double norm(const Generator& gen, const Field& u, NormKind kind);

/// The bilinear pairing matching `kind`; pairing(u, u) equals the squared
/// norm of the same kind.
double pairing(const Generator& gen, const Field& u, const Field& v,
               NormKind kind);

/// (1 - L) u: the Riesz isomorphism F_{1,2} -> F*_{1,2}.
Field riesz_forward(const Generator& gen, const Field& u);
/// (1 - L)^{-1} u: the inverse Riesz map.
Field riesz_inverse(const Generator& gen, const Field& u);

/// The duality pairing <w, v>_{V* x V} with V = L2(mu), computed as
/// <(1-L)^{-1} w, v>_2. For w in L2(mu) it coincides with the F*_{1,2}
/// inner product of w and v.
double dual_pairing(const Generator& gen, const Field& w, const Field& v);

/// (L2)*-norm of (1-L)u via the supremum over |v|_2 = 1, attained at
/// v = u/|u|_2; used as an oracle against the spectral route.
struct IsometryReport {
    double dual_norm = 0.0;  // |(1-L)u|_{(L2)*}
    double l2_norm = 0.0;    // |u|_2
    double gap = 0.0;
};
IsometryReport l2_isometry_check(const Generator& gen, const Field& u);

}  // namespace spml
