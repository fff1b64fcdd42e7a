#include "spml/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace spml {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t mode, std::uint64_t step) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ path);
    h = splitmix64(h ^ mode);
    h = splitmix64(h ^ step);
    return h;
}

// Acklam's rational approximation to the inverse normal CDF, refined with
// one Halley step through erfc; accurate to ~1e-15 over (0,1).
double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
             a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r +
             1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
              c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

}  // namespace

double normal_variate(std::uint64_t seed, std::uint64_t path,
                      std::uint64_t mode, std::uint64_t step) {
    std::uint64_t h = mix_key(seed, path, mode, step);
    double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
    return inverse_normal_cdf(u);
}

Eigen::VectorXd WienerSpec::increment(std::uint64_t path,
                                      std::uint64_t step) const {
    if (modes < 1) throw std::invalid_argument("wiener spec needs modes >= 1");
    if (aggregate < 1) throw std::invalid_argument("aggregate must be >= 1");
    const double dt_fine = dt / aggregate;
    const double scale = std::sqrt(dt_fine);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(modes);
    for (int k = 0; k < modes; ++k)
        for (int j = 0; j < aggregate; ++j)
            dw[k] += scale * normal_variate(
                                 seed, path, static_cast<std::uint64_t>(k),
                                 step * static_cast<std::uint64_t>(aggregate) + j);
    return dw;
}

double TimeCoefficient::operator()(double t) const {
    switch (kind) {
        case Kind::Const:
            return value;
        case Kind::Sin:
            return value * (1.0 + 0.5 * std::sin(2.0 * M_PI * t / period));
    }
    return value;
}

double TimeCoefficient::sup_abs() const {
    switch (kind) {
        case Kind::Const:
            return std::abs(value);
        case Kind::Sin:
            return 1.5 * std::abs(value);
    }
    return std::abs(value);
}

double SpectralMultiplier::operator()(double theta) const {
    switch (kind) {
        case Kind::One:
            return 1.0;
        case Kind::Resolvent:
            return std::pow(1.0 + theta, -power);
    }
    return 1.0;
}

bool NoiseOperator::is_zero() const {
    for (const auto& gk : g)
        if (gk.sup_abs() != 0.0) return false;
    return true;
}

double NoiseOperator::c2(const Generator& gen) const {
    if (g.size() != gamma.size())
        throw std::invalid_argument("noise operator g/gamma length mismatch");
    double total = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        double op_norm = 0.0;  // F* operator norm of a spectral multiplier
        for (Eigen::Index j = 0; j < gen.size(); ++j)
            op_norm = std::max(op_norm, std::abs(gamma[k](gen.thetas()[j])));
        double gs = g[k].sup_abs();
        total += gs * gs * op_norm * op_norm;
    }
    return total;
}

NoiseOperator NoiseOperator::zero() { return {}; }

NoiseOperator NoiseOperator::rank_one(double g0) {
    NoiseOperator B;
    B.g.push_back({TimeCoefficient::Kind::Const, g0, 1.0});
    B.gamma.push_back({SpectralMultiplier::Kind::One, 1.0});
    return B;
}

NoiseOperator NoiseOperator::smoothing(double g0, double power) {
    NoiseOperator B;
    B.g.push_back({TimeCoefficient::Kind::Const, g0, 1.0});
    B.gamma.push_back({SpectralMultiplier::Kind::Resolvent, power});
    return B;
}

double hs_norm_sq(const Generator& gen, const NoiseOperator& B, double t,
                  const Field& u) {
    gen.require_bound(u);
    Eigen::VectorXd uh = gen.to_spectral(u.values());
    double total = 0.0;
    for (std::size_t k = 0; k < B.g.size(); ++k) {
        double gk = B.g[k](t);
        double term = 0.0;
        for (Eigen::Index j = 0; j < gen.size(); ++j) {
            double coeff = B.gamma[k](gen.thetas()[j]) * uh[j];
            term += coeff * coeff / (1.0 + gen.thetas()[j]);
        }
        total += gk * gk * term;
    }
    return total;
}

Field diffuse(const Generator& gen, const NoiseOperator& B, double t,
              const Field& u, const Eigen::VectorXd& dW) {
    gen.require_bound(u);
    if (dW.size() != static_cast<Eigen::Index>(B.g.size()))
        throw std::invalid_argument("noise increment mode count mismatch");
    Eigen::VectorXd uh = gen.to_spectral(u.values());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(gen.size());
    for (std::size_t k = 0; k < B.g.size(); ++k) {
        double scale = B.g[k](t) * dW[static_cast<Eigen::Index>(k)];
        for (Eigen::Index j = 0; j < gen.size(); ++j)
            out[j] += scale * B.gamma[k](gen.thetas()[j]) * uh[j];
    }
    return Field(u.space(), gen.from_spectral(out));
}

Field random_field(const Generator& gen, std::uint64_t seed,
                   std::uint64_t index) {
    Eigen::VectorXd coeffs(gen.size());
    for (Eigen::Index k = 0; k < gen.size(); ++k)
        coeffs[k] = normal_variate(seed, index, static_cast<std::uint64_t>(k),
                                   0xf1e1dULL);
    return Field(gen.space(), gen.from_spectral(coeffs));
}

H2Report verify_h2(const Generator& gen, const NoiseOperator& B, int samples,
                   std::uint64_t seed, double horizon) {
    if (samples < 1) throw std::invalid_argument("verify_h2 needs samples >= 1");
    H2Report report;
    report.claimed_c1 = B.c1(gen);
    report.claimed_c2 = B.c2(gen);
    report.samples = samples;
    for (int s = 0; s < samples; ++s) {
        double t = horizon * (s % 101) / 100.0;
        Field u = random_field(gen, seed, 2 * s);
        Field v = random_field(gen, seed, 2 * s + 1);
        Field w = u - v;
        auto dual_sq = [&](const Field& f) {
            Eigen::VectorXd fh = gen.to_spectral(f.values());
            double acc = 0.0;
            for (Eigen::Index j = 0; j < gen.size(); ++j)
                acc += fh[j] * fh[j] / (1.0 + gen.thetas()[j]);
            return acc;
        };
        double wn = dual_sq(w);
        if (wn > 1e-14) {
            // Linearity: B(u) - B(v) = B(u - v).
            report.measured_c1 =
                std::max(report.measured_c1, hs_norm_sq(gen, B, t, w) / wn);
        }
        double un = dual_sq(u);
        if (un > 1e-14)
            report.measured_c2 =
                std::max(report.measured_c2, hs_norm_sq(gen, B, t, u) / un);
    }
    report.pass = report.measured_c1 <= report.claimed_c1 + 1e-9 &&
                  report.measured_c2 <= report.claimed_c2 + 1e-9;
    return report;
}

}  // namespace spml
