#pragma once

#include "spml/generator.hpp"
#include "spml/noise.hpp"
#include "spml/nonlinearity.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace spml {

/// Outcome of one variational-condition probe on A = (L - nu) Psi with
/// noise operator B.
struct ConditionReport {
    std::string condition;
    int samples = 0;
    std::map<std::string, double> constants;
    bool applicable = true;
    bool pass = false;
    std::string worst_case;
};

/// Hemicontinuity: lambda -> <A(u + lambda v), w> is continuous at 0; checked
/// quantitatively against the Lipschitz envelope 2 k |lambda| |v|_2 |w|_2
/// at lambda = 2^{-j}, j = 1..20.
ConditionReport check_hemicontinuity(const Generator& gen,
                                     const Nonlinearity& psi, double nu,
                                     int triples, std::uint64_t seed = 11);

/// Weak monotonicity: 2<Au - Av, u - v> + ||B(u)-B(v)||^2_HS bounded by
/// [2(1-nu)^2/alpha_tilde + C1] ||u - v||^2_{F*}.
ConditionReport check_weak_monotonicity(const Generator& gen,
                                        const Nonlinearity& psi,
                                        const NoiseOperator& B, double nu,
                                        int pairs, std::uint64_t seed = 12);

/// Coercivity: needs the strong-coercivity flag on Psi; with
/// eps^2 = c/(2 k^2 (1-nu))
/// the |u|_2^2 coefficient is -c and the inequality is asserted sample-wise.
/// Psi without the flag yields an inapplicable report, not a failure.
ConditionReport check_coercivity(const Generator& gen, const Nonlinearity& psi,
                                 const NoiseOperator& B, double nu,
                                 int samples, std::uint64_t seed = 13);

/// Boundedness: |Au|_{V*} / |u|_2 <= 2k.
ConditionReport check_boundedness(const Generator& gen,
                                  const Nonlinearity& psi, double nu,
                                  int samples, std::uint64_t seed = 14);

}  // namespace spml
