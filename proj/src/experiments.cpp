#include "spml/experiments.hpp"

#include "spml/spaces.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace spml {

void StudySpec::validate() const {
    base.validate();
    if (values.size() < 2)
        throw std::invalid_argument("study axis needs at least two values");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0)
            throw std::invalid_argument("axis values must be nonnegative");
        if (i > 0 && values[i] >= values[i - 1])
            throw std::invalid_argument("axis values must be strictly decreasing");
    }
    if (paths < 1) throw std::invalid_argument("study needs paths >= 1");
    if (axis != StudyAxis::Dt && !common_noise)
        throw std::invalid_argument(
            "Cauchy studies require common random numbers");
    if (axis == StudyAxis::Dt) {
        for (std::size_t i = 1; i < values.size(); ++i)
            if (std::abs(values[i - 1] / values[i] - 2.0) > 1e-12)
                throw std::invalid_argument("dt axis must be dyadic");
    }
}

namespace {

void parallel_for_paths(int paths, int threads,
                        const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, paths));
    if (threads == 1) {
        for (int p = 0; p < paths; ++p) body(p);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            try {
                for (int p = next.fetch_add(1); p < paths;
                     p = next.fetch_add(1))
                    body(p);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

struct MeanStderr {
    double mean = 0.0, se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& samples) {
    MeanStderr out;
    const std::size_t m = samples.size();
    if (m == 0) return out;
    double sum = 0.0;
    for (double v : samples) sum += v;  // fixed order
    out.mean = sum / static_cast<double>(m);
    if (m >= 2) {
        double ss = 0.0;
        for (double v : samples) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(m - 1) /
                           static_cast<double>(m));
    }
    return out;
}

CascadeConfig with_axis_value(const StudySpec& spec, double value) {
    CascadeConfig cfg = spec.base;
    switch (spec.axis) {
        case StudyAxis::Lambda:
            cfg.lambda = value;
            break;
        case StudyAxis::Nu:
            cfg.nu = value;
            cfg.lambda = 0.0;
            break;
        case StudyAxis::Dt:
            cfg.dt = value;
            break;
    }
    return cfg;
}

StudyReport cauchy_study(const Generator& gen, const Nonlinearity& psi,
                         const NoiseOperator& B, const StudySpec& spec,
                         const Field& x) {
    spec.validate();
    const std::size_t n_pairs = spec.values.size() - 1;
    const int n_steps = spec.base.steps();
    WienerSpec wiener{std::max(B.modes(), 1), spec.seed, spec.base.dt, 1};

    // d[pair][path]
    std::vector<std::vector<double>> d(n_pairs,
                                       std::vector<double>(spec.paths, 0.0));

    parallel_for_paths(spec.paths, spec.threads, [&](int p) {
        std::vector<Trajectory> levels;
        levels.reserve(spec.values.size());
        for (double value : spec.values)
            levels.push_back(simulate(gen, psi, B, wiener,
                                      with_axis_value(spec, value), x, p));
        for (std::size_t i = 0; i < n_pairs; ++i) {
            const Trajectory& a = levels[i];
            const Trajectory& b = levels[i + 1];
            double sup_sq = 0.0, psi_int = 0.0;
            for (int n = 0; n <= n_steps; ++n) {
                Field diff = a.states[n] - b.states[n];
                double dn = norm(gen, diff, NormKind::f12_dual());
                sup_sq = std::max(sup_sq, dn * dn);
                if (n < n_steps) {
                    Field pd = apply_field(psi, a.states[n]) -
                               apply_field(psi, b.states[n]);
                    double pn = l2_norm(pd);
                    psi_int += spec.base.dt * pn * pn;
                }
            }
            d[i][p] = sup_sq + psi_int;
        }
    });

    StudyReport report;
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < n_pairs; ++i) {
        MeanStderr ms = mean_stderr(d[i]);
        AxisPoint point;
        point.value = spec.values[i] + spec.values[i + 1];
        point.statistic = ms.mean;
        point.standard_error = ms.se;
        report.points.push_back(point);
        xs.push_back(point.value);
        ys.push_back(std::max(point.statistic, 1e-300));
    }
    fit_loglog_slope(xs, ys, report.slope, report.slope_halfwidth);
    report.threshold = 0.8;
    report.pass = report.slope >= report.threshold;
    return report;
}

}  // namespace

std::vector<Trajectory> run_ensemble(const Generator& gen,
                                     const Nonlinearity& psi,
                                     const NoiseOperator& B,
                                     const WienerSpec& wiener,
                                     const CascadeConfig& cfg, const Field& x,
                                     int paths, int threads) {
    std::vector<Trajectory> out(paths);
    parallel_for_paths(paths, threads, [&](int p) {
        out[p] = simulate(gen, psi, B, wiener, cfg, x, p);
    });
    return out;
}

EnergyReport energy_functional(const std::vector<Trajectory>& trajectories,
                               const CascadeConfig& cfg) {
    if (trajectories.empty())
        throw std::invalid_argument("energy functional needs trajectories");
    std::vector<double> per_path, per_path_sup, per_path_diss, per_path_int;
    for (const Trajectory& traj : trajectories) {
        double sup_sq = 0.0, f12_int = 0.0, l2_int = 0.0;
        const std::size_t n = traj.l2_trace.size();
        for (std::size_t i = 0; i < n; ++i) {
            sup_sq = std::max(sup_sq, traj.l2_trace[i] * traj.l2_trace[i]);
            l2_int += cfg.dt * traj.l2_trace[i] * traj.l2_trace[i];
            if (i + 1 < n)  // left endpoint rule
                f12_int += cfg.dt * traj.f12_trace[i] * traj.f12_trace[i];
        }
        per_path_sup.push_back(sup_sq);
        per_path_diss.push_back(4.0 * cfg.lambda * cfg.nu * f12_int);
        per_path.push_back(per_path_sup.back() + per_path_diss.back());
        per_path_int.push_back(l2_int);
    }
    EnergyReport report;
    MeanStderr total = mean_stderr(per_path);
    report.functional = total.mean;
    report.standard_error = total.se;
    report.sup_term = mean_stderr(per_path_sup).mean;
    report.dissipation_term = mean_stderr(per_path_diss).mean;
    MeanStderr integrated = mean_stderr(per_path_int);
    report.integrated_second_moment = integrated.mean;
    report.integrated_second_moment_se = integrated.se;
    return report;
}

StudyReport lambda_cauchy_study(const Generator& gen, const Nonlinearity& psi,
                                const NoiseOperator& B, const StudySpec& spec,
                                const Field& x) {
    if (spec.axis != StudyAxis::Lambda)
        throw std::invalid_argument("spec axis must be lambda");
    return cauchy_study(gen, psi, B, spec, x);
}

StudyReport nu_cauchy_study(const Generator& gen, const Nonlinearity& psi,
                            const NoiseOperator& B, const StudySpec& spec,
                            const Field& x) {
    if (spec.axis != StudyAxis::Nu)
        throw std::invalid_argument("spec axis must be nu");
    return cauchy_study(gen, psi, B, spec, x);
}

StudyReport dt_refinement_study(const Generator& gen, const Nonlinearity& psi,
                                const NoiseOperator& B, const StudySpec& spec,
                                const Field& x) {
    if (spec.axis != StudyAxis::Dt)
        throw std::invalid_argument("spec axis must be dt");
    spec.validate();

    StudyReport report;
    std::vector<double> xs, ys;

    const bool deterministic = B.is_zero();
    const double dt_finest = spec.values.back();

    const bool linear_psi =
        psi.name == "identity" || psi.name == "linear";
    if (deterministic && linear_psi) {
        // Linear Psi = c r: the scheme approximates
        // X(t) = exp(-t (nu + theta)(c + lambda)) x mode by mode.
        const double c = psi.eval(1.0);
        for (double dt : spec.values) {
            CascadeConfig cfg = with_axis_value(spec, dt);
            WienerSpec wiener{1, spec.seed, dt, 1};
            Trajectory traj =
                simulate(gen, psi, NoiseOperator::zero(), wiener, cfg, x, 0);
            Field exact = gen.apply_multiplier(
                [&](double th) {
                    return std::exp(-cfg.horizon * (cfg.nu + th) *
                                    (c + cfg.lambda));
                },
                x);
            double err = l2_norm(traj.states.back() - exact);
            report.points.push_back({dt, err, 0.0});
            xs.push_back(dt);
            ys.push_back(std::max(err, 1e-300));
        }
        fit_loglog_slope(xs, ys, report.slope, report.slope_halfwidth);
        report.threshold = 0.9;
        report.pass = report.slope >= 0.9 && report.slope <= 1.1;
        return report;
    }

    // Coupled-path self-convergence: all levels aggregate the same finest
    // increments, so consecutive-level differences measure the scheme.
    const std::size_t n_levels = spec.values.size();
    std::vector<std::vector<double>> err_sq(
        n_levels - 1, std::vector<double>(spec.paths, 0.0));
    parallel_for_paths(spec.paths, spec.threads, [&](int p) {
        std::vector<Field> terminal;
        for (double dt : spec.values) {
            int aggregate = static_cast<int>(std::llround(dt / dt_finest));
            WienerSpec wiener{std::max(B.modes(), 1), spec.seed, dt, aggregate};
            CascadeConfig cfg = with_axis_value(spec, dt);
            Trajectory traj = simulate(gen, psi, B, wiener, cfg, x, p);
            terminal.push_back(traj.states.back());
        }
        for (std::size_t i = 0; i + 1 < n_levels; ++i) {
            double e = l2_norm(terminal[i] - terminal[i + 1]);
            err_sq[i][p] = e * e;
        }
    });
    for (std::size_t i = 0; i + 1 < n_levels; ++i) {
        MeanStderr ms = mean_stderr(err_sq[i]);
        double rms = std::sqrt(std::max(ms.mean, 0.0));
        report.points.push_back({spec.values[i], rms, ms.se});
        xs.push_back(spec.values[i]);
        ys.push_back(std::max(rms, 1e-300));
    }
    fit_loglog_slope(xs, ys, report.slope, report.slope_halfwidth);
    report.threshold = 0.4;
    report.pass = report.slope >= report.threshold;
    return report;
}

ContractionReport initial_data_contraction(const Generator& gen,
                                           const Nonlinearity& psi,
                                           const NoiseOperator& B,
                                           const StudySpec& spec,
                                           const Field& x, const Field& y) {
    spec.base.validate();
    if (!spec.common_noise)
        throw std::invalid_argument("contraction study requires common noise");
    const int n_steps = spec.base.steps();
    WienerSpec wiener{std::max(B.modes(), 1), spec.seed, spec.base.dt, 1};

    std::vector<std::vector<double>> diff_sq(
        n_steps + 1, std::vector<double>(spec.paths, 0.0));
    parallel_for_paths(spec.paths, spec.threads, [&](int p) {
        Trajectory a = simulate(gen, psi, B, wiener, spec.base, x, p);
        Trajectory b = simulate(gen, psi, B, wiener, spec.base, y, p);
        for (int n = 0; n <= n_steps; ++n) {
            double dn =
                norm(gen, a.states[n] - b.states[n], NormKind::f12_dual());
            diff_sq[n][p] = dn * dn;
        }
    });

    ContractionReport report;
    report.growth_constant = B.c1(gen) + 2.0 / alpha_tilde(psi);
    double base_sq = std::pow(norm(gen, x - y, NormKind::f12_dual()), 2);
    report.pass = true;
    for (int n = 0; n <= n_steps; ++n) {
        double t = n * spec.base.dt;
        double mean = mean_stderr(diff_sq[n]).mean;
        bool ok = mean <= std::exp(report.growth_constant * t) * base_sq +
                              1e-12 * std::max(1.0, base_sq);
        report.times.push_back(t);
        report.mean_diff_sq.push_back(mean);
        report.within_bound.push_back(ok);
        if (!ok) report.pass = false;
    }
    return report;
}

std::vector<double> linear_cauchy_oracle(const Generator& gen,
                                         const StudySpec& spec,
                                         const Field& x) {
    spec.validate();
    const int n_steps = spec.base.steps();
    Eigen::VectorXd xh = gen.to_spectral(x.values());

    // One implicit spectral recursion per axis value; differences between
    // consecutive levels give D exactly (Parseval in the eigenbasis).
    auto run = [&](double value) {
        CascadeConfig cfg = with_axis_value(spec, value);
        std::vector<Eigen::VectorXd> states;
        states.reserve(n_steps + 1);
        Eigen::VectorXd state = xh;
        states.push_back(state);
        for (int n = 0; n < n_steps; ++n) {
            for (Eigen::Index k = 0; k < state.size(); ++k)
                state[k] /= 1.0 + cfg.dt * (cfg.nu + gen.thetas()[k]) *
                                      (1.0 + cfg.lambda);
            states.push_back(state);
        }
        return states;
    };

    std::vector<std::vector<Eigen::VectorXd>> levels;
    for (double value : spec.values) levels.push_back(run(value));

    std::vector<double> d;
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        double sup_sq = 0.0, psi_int = 0.0;
        for (int n = 0; n <= n_steps; ++n) {
            Eigen::VectorXd diff = levels[i][n] - levels[i + 1][n];
            double dual_sq = 0.0;
            for (Eigen::Index k = 0; k < diff.size(); ++k)
                dual_sq += diff[k] * diff[k] / (1.0 + gen.thetas()[k]);
            sup_sq = std::max(sup_sq, dual_sq);
            if (n < n_steps) psi_int += spec.base.dt * diff.squaredNorm();
        }
        d.push_back(sup_sq + psi_int);
    }
    return d;
}

std::vector<double> linear_second_moment_oracle(const Generator& gen,
                                                const NoiseOperator& B,
                                                const CascadeConfig& cfg,
                                                const Field& x) {
    cfg.validate();
    const int n_steps = cfg.steps();
    Eigen::VectorXd m = gen.to_spectral(x.values()).array().square();
    std::vector<double> out;
    out.reserve(n_steps + 1);
    out.push_back(m.sum());
    for (int n = 0; n < n_steps; ++n) {
        double t = n * cfg.dt;
        for (Eigen::Index k = 0; k < m.size(); ++k) {
            double theta = gen.thetas()[k];
            double noise_gain = 0.0;
            for (std::size_t j = 0; j < B.g.size(); ++j) {
                double gj = B.g[j](t) * B.gamma[j](theta);
                noise_gain += gj * gj * cfg.dt;
            }
            double denom = 1.0 + cfg.dt * (cfg.nu + theta) * (1.0 + cfg.lambda);
            m[k] = m[k] * (1.0 + noise_gain) / (denom * denom);
        }
        out.push_back(m.sum());
    }
    return out;
}

void fit_loglog_slope(const std::vector<double>& x,
                      const std::vector<double>& y, double& slope,
                      double& halfwidth) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("slope fit needs at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    slope = (n * sxy - sx * sy) / denom;
    double intercept = (sy - slope * sx) / n;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = std::log(y[i]) - (slope * std::log(x[i]) + intercept);
        rss += r * r;
    }
    halfwidth = n > 2 ? 2.0 * std::sqrt(rss / (n - 2) / (denom / n)) : 0.0;
}

}  // namespace spml
