#include "spml/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace spml {

double alpha_tilde(const Nonlinearity& psi) {
    if (!(psi.lipschitz > 0.0))
        throw std::invalid_argument("alpha_tilde needs a positive Lipschitz constant");
    return 1.0 / (psi.lipschitz + 1.0);
}

Field apply_field(const Nonlinearity& psi, const Field& u) {
    Eigen::VectorXd out(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = psi.eval(u[i]);
    return u.with_values(std::move(out));
}

H1Report check_h1(const Nonlinearity& psi, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("sampling grid is empty");
    if (std::none_of(grid.begin(), grid.end(),
                     [](double r) { return r == 0.0; }))
        throw std::invalid_argument("sampling grid must contain 0");

    H1Report report;
    report.psi_zero_residual = std::abs(psi.eval(0.0));
    report.measured_coercivity = std::numeric_limits<double>::infinity();

    std::vector<double> pts = grid;
    std::sort(pts.begin(), pts.end());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double r = pts[i];
        if (r != 0.0) {
            double ratio = psi.eval(r) * r / (r * r);
            report.measured_coercivity =
                std::min(report.measured_coercivity, ratio);
        }
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            double rp = pts[j];
            double dpsi = psi.eval(rp) - psi.eval(r);
            double dr = rp - r;
            if (dr <= 0.0) continue;
            report.max_monotonicity_violation =
                std::max(report.max_monotonicity_violation, -dpsi);
            report.measured_lipschitz =
                std::max(report.measured_lipschitz, std::abs(dpsi) / dr);
        }
    }
    if (!std::isfinite(report.measured_coercivity))
        report.measured_coercivity = 0.0;

    report.monotone = report.max_monotonicity_violation <= 1e-12;
    report.lipschitz_ok = report.measured_lipschitz <= psi.lipschitz + 1e-9;
    report.pass = report.psi_zero_residual <= 1e-12 && report.monotone &&
                  report.lipschitz_ok;
    return report;
}

std::vector<double> sampling_grid(double radius, int count) {
    std::vector<double> grid;
    grid.reserve(count + 1);
    for (int i = 0; i < count; ++i)
        grid.push_back(-radius + 2.0 * radius * i / (count - 1));
    grid.push_back(0.0);
    return grid;
}

Nonlinearity identity_psi() {
    return {"identity", [](double r) { return r; }, [](double) { return 1.0; },
            1.0, 1.0};
}

Nonlinearity linear_psi(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("linear slope must be positive");
    return {"linear", [c](double r) { return c * r; },
            [c](double) { return c; }, c, c};
}

Nonlinearity saturation_psi() {
    return {"saturation",
            [](double r) { return std::clamp(r, -1.0, 1.0); },
            [](double r) { return (r >= -1.0 && r < 1.0) ? 1.0 : 0.0; },
            1.0,
            std::nullopt};
}

Nonlinearity dead_zone_psi() {
    auto eval = [](double r) {
        double mag = std::max(std::abs(r) - 1.0, 0.0);
        return r >= 0.0 ? mag : -mag;
    };
    auto deriv = [](double r) { return (r >= 1.0 || r < -1.0) ? 1.0 : 0.0; };
    return {"dead_zone", eval, deriv, 1.0, std::nullopt};
}

namespace {

struct Table {
    std::vector<double> r, v;

    double eval(double x) const {
        if (x <= r.front())
            return v.front() + slope_at(0) * (x - r.front());
        if (x >= r.back())
            return v.back() + slope_at(r.size() - 2) * (x - r.back());
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
        return v[i] + slope_at(i) * (x - r[i]);
    }

    double right_slope(double x) const {
        if (x < r.front()) return slope_at(0);
        if (x >= r.back()) return slope_at(r.size() - 2);
        auto it = std::upper_bound(r.begin(), r.end(), x);
        std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
        return slope_at(i);
    }

    double slope_at(std::size_t segment) const {
        return (v[segment + 1] - v[segment]) / (r[segment + 1] - r[segment]);
    }

    double max_abs_slope() const {
        double k = 0.0;
        for (std::size_t i = 0; i + 1 < r.size(); ++i)
            k = std::max(k, std::abs(slope_at(i)));
        return k;
    }
};

Nonlinearity from_table(std::string name, Table table,
                        std::optional<double> coercivity) {
    double k = table.max_abs_slope();
    auto shared = std::make_shared<Table>(std::move(table));
    auto shared2 = shared;
    return {std::move(name),
            [shared](double x) { return shared->eval(x); },
            [shared2](double x) { return shared2->right_slope(x); },
            std::max(k, 1e-300), coercivity};
}

}  // namespace

Nonlinearity regularized_porous_medium_psi(double m, double rmax,
                                           int segments) {
    if (!(m >= 1.0)) throw std::invalid_argument("porous medium exponent m >= 1");
    if (!(rmax > 0.0)) throw std::invalid_argument("validity radius must be positive");
    if (segments < 2) throw std::invalid_argument("need at least two segments");
    Table table;
    for (int i = -segments; i <= segments; ++i) {
        double x = rmax * i / segments;
        table.r.push_back(x);
        table.v.push_back(x >= 0.0 ? std::pow(x, m) : -std::pow(-x, m));
    }
    return from_table("porous_medium", std::move(table), std::nullopt);
}

Nonlinearity breakpoint_psi(
    const std::vector<std::pair<double, double>>& pairs) {
    if (pairs.size() < 2)
        throw std::invalid_argument("breakpoint table needs at least two points");
    Table table;
    for (auto& [r, v] : pairs) {
        if (!table.r.empty() && r <= table.r.back())
            throw std::invalid_argument("breakpoint abscissae must be strictly increasing");
        table.r.push_back(r);
        table.v.push_back(v);
    }
    // Monotonicity and Psi(0)=0 of user tables are checked by check_h1,
    // not here: the CLI reports them as check failures instead of refusing
    // to load.
    return from_table("breakpoints", std::move(table), std::nullopt);
}

std::vector<Nonlinearity> catalog() {
    return {identity_psi(), linear_psi(0.5), saturation_psi(), dead_zone_psi(),
            regularized_porous_medium_psi(2.0, 2.0)};
}

}  // namespace spml
