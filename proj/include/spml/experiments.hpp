#pragma once

#include "spml/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spml {

enum class StudyAxis { Lambda, Nu, Dt };

/// Monte Carlo study over one regularization axis. Cauchy studies (lambda,
/// nu) require common random numbers across axis values; the dt axis
/// requires a dyadic list with coupled increments.
struct StudySpec {
    CascadeConfig base;
    StudyAxis axis = StudyAxis::Lambda;
    std::vector<double> values;  // strictly decreasing, >= 0
    int paths = 64;
    bool common_noise = true;
    std::uint64_t seed = 1;
    int threads = 1;

    void validate() const;
};

struct AxisPoint {
    double value = 0.0;      // lambda + lambda', nu + nu', or dt
    double statistic = 0.0;  // D(.) or refinement error
    double standard_error = 0.0;
};

struct StudyReport {
    std::vector<AxisPoint> points;
    double slope = 0.0;
    double slope_halfwidth = 0.0;  // least-squares confidence half-width
    double threshold = 0.8;
    bool pass = false;
};

/// Runs M independent paths; deterministic function of (spec, seed) with a
/// fixed reduction order, so results are thread-count independent.
std::vector<Trajectory> run_ensemble(const Generator& gen,
                                     const Nonlinearity& psi,
                                     const NoiseOperator& B,
                                     const WienerSpec& wiener,
                                     const CascadeConfig& cfg, const Field& x,
                                     int paths, int threads = 1);

struct EnergyReport {
    double functional = 0.0;  // E[sup |X|_2^2] + 4 lambda nu E int ||X||_F12^2
    double standard_error = 0.0;
    double sup_term = 0.0;
    double dissipation_term = 0.0;
    /// Time-integrated second moment dt * sum_n E |X_n|_2^2 with its
    /// standard error; the quantity the linear oracle reproduces exactly.
    double integrated_second_moment = 0.0;
    double integrated_second_moment_se = 0.0;
};
EnergyReport energy_functional(const std::vector<Trajectory>& trajectories,
                               const CascadeConfig& cfg);

StudyReport lambda_cauchy_study(const Generator& gen, const Nonlinearity& psi,
                                const NoiseOperator& B, const StudySpec& spec,
                                const Field& x);
StudyReport nu_cauchy_study(const Generator& gen, const Nonlinearity& psi,
                            const NoiseOperator& B, const StudySpec& spec,
                            const Field& x);
StudyReport dt_refinement_study(const Generator& gen, const Nonlinearity& psi,
                                const NoiseOperator& B, const StudySpec& spec,
                                const Field& x);

struct ContractionReport {
    std::vector<double> times;
    std::vector<double> mean_diff_sq;  // E ||X_n(x) - X_n(y)||^2_{F*}
    std::vector<bool> within_bound;    // vs e^{C t_n} ||x - y||^2_{F*}
    double growth_constant = 0.0;      // C1 + 2/alpha_tilde
    bool pass = false;
};
ContractionReport initial_data_contraction(const Generator& gen,
                                           const Nonlinearity& psi,
                                           const NoiseOperator& B,
                                           const StudySpec& spec,
                                           const Field& x, const Field& y);

/// Deterministic difference recursion for Psi = id, B = 0: the exact D
/// values of the Cauchy studies, one per consecutive axis pair. No sampling.
std::vector<double> linear_cauchy_oracle(const Generator& gen,
                                         const StudySpec& spec,
                                         const Field& x);

/// Exact per-grid-point second moments E |X_n|_2^2 of the linear scheme
/// (Psi = id) driven by spectral multiplicative noise.
std::vector<double> linear_second_moment_oracle(const Generator& gen,
                                                const NoiseOperator& B,
                                                const CascadeConfig& cfg,
                                                const Field& x);

/// Least-squares slope of log(y) against log(x); half-width is the
/// 2-sigma band of the slope estimate.
void fit_loglog_slope(const std::vector<double>& x,
                      const std::vector<double>& y, double& slope,
                      double& halfwidth);

}  // namespace spml
