#include "spml/spaces.hpp"

#include <cmath>
#include <stdexcept>

namespace spml {

NormKind NormKind::f12_dual_nu(double nu) {
    if (!(nu > 0.0))
        throw std::invalid_argument("nu-weighted dual norm needs nu > 0");
    return {Tag::F12DualNu, nu};
}

namespace {

double spectral_weight(NormKind kind, double theta) {
    switch (kind.tag) {
        case NormKind::Tag::L2:
            return 1.0;
        case NormKind::Tag::F12:
            return 1.0 + theta;
        case NormKind::Tag::F12Dual:
            return 1.0 / (1.0 + theta);
        case NormKind::Tag::F12DualNu:
            return 1.0 / (kind.nu + theta);
    }
    return 1.0;
}

}  // namespace

double pairing(const Generator& gen, const Field& u, const Field& v,
               NormKind kind) {
    gen.require_bound(u);
    gen.require_bound(v);
    Eigen::VectorXd uh = gen.to_spectral(u.values());
    Eigen::VectorXd vh = gen.to_spectral(v.values());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < uh.size(); ++k)
        acc += spectral_weight(kind, gen.thetas()[k]) * uh[k] * vh[k];
    return acc;
}

double norm(const Generator& gen, const Field& u, NormKind kind) {
    return std::sqrt(std::max(pairing(gen, u, u, kind), 0.0));
}

Field riesz_forward(const Generator& gen, const Field& u) {
    return gen.apply_multiplier([](double th) { return 1.0 + th; }, u);
}

Field riesz_inverse(const Generator& gen, const Field& u) {
    return gen.apply_multiplier([](double th) { return 1.0 / (1.0 + th); }, u);
}

double dual_pairing(const Generator& gen, const Field& w, const Field& v) {
    return l2_inner(riesz_inverse(gen, w), v);
}

IsometryReport l2_isometry_check(const Generator& gen, const Field& u) {
    gen.require_bound(u);
    IsometryReport report;
    report.l2_norm = l2_norm(u);
    if (report.l2_norm == 0.0) return report;
    // Supremum over |v|_2 = 1 of <(1-L)u, v>_{V* x V}, attained at
    // v = u/|u|_2. The pairing goes through the represented image of
    // (1-L)u, so the spectral round trip is actually exercised.
    Field v = u * (1.0 / report.l2_norm);
    report.dual_norm = dual_pairing(gen, riesz_forward(gen, u), v);
    report.gap = std::abs(report.dual_norm - report.l2_norm);
    return report;
}

}  // namespace spml
