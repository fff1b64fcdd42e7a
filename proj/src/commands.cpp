#include "spml/commands.hpp"

#include "spml/conditions.hpp"
#include "spml/spaces.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace spml {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

struct Settings {
    Scenario scenario;
    std::uint64_t seed;
    int paths;
    int threads;
    fs::path output;
};

Settings load_settings(const std::string& config_path,
                       const CliOverrides& overrides) {
    Settings s{load_scenario_file(config_path), 0, 0, 1, {}};
    s.seed = overrides.seed.value_or(s.scenario.seed);
    s.paths = overrides.paths.value_or(s.scenario.paths);
    s.threads = overrides.threads.value_or(1);
    s.output = overrides.output.value_or(s.scenario.output_dir);
    if (s.paths < 1) throw ConfigError("paths: must be positive");
    if (s.threads < 1) throw ConfigError("threads: must be positive");
    if (overrides.axis) {
        if (!s.scenario.study)
            throw ConfigError("study: --axis given but config has no study block");
        if (*overrides.axis == "lambda")
            s.scenario.study->axis = StudyAxis::Lambda;
        else if (*overrides.axis == "nu")
            s.scenario.study->axis = StudyAxis::Nu;
        else if (*overrides.axis == "dt")
            s.scenario.study->axis = StudyAxis::Dt;
        else
            throw ConfigError("--axis: must be lambda, nu or dt");
    }
    return s;
}

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

json manifest_base(const std::string& config_path, const Settings& s) {
    json m;
    m["tool_version"] = kToolVersion;
    m["config_path"] = config_path;
    m["config_checksum_fnv1a64"] = file_checksum(config_path);
    m["seed"] = s.seed;
    m["paths"] = s.paths;
    m["threads"] = s.threads;
    return m;
}

struct CheckLine {
    std::string name;
    bool applicable = true;
    bool pass = false;
};

void print_check(const CheckLine& line) {
    const char* verdict =
        !line.applicable ? "n/a " : (line.pass ? "pass" : "FAIL");
    std::cout << "[" << verdict << "] " << line.name << "\n";
}

json condition_json(const ConditionReport& r) {
    json j;
    j["condition"] = r.condition;
    j["samples"] = r.samples;
    j["applicable"] = r.applicable;
    j["pass"] = r.pass;
    j["worst_case"] = r.worst_case;
    for (const auto& [k, v] : r.constants) j["constants"][k] = v;
    return j;
}

// Riesz identities on random fields: norm match of (1-L): F12 -> F12* and
// exact round trip through the inverse.
json verify_riesz(const Generator& gen, std::uint64_t seed, int samples,
                  bool& pass) {
    double max_norm_gap = 0.0, max_round_trip = 0.0, max_probe_gap = 0.0;
    for (int i = 0; i < samples; ++i) {
        Field u = random_field(gen, seed, static_cast<std::uint64_t>(i));
        double f12 = norm(gen, u, NormKind::f12());
        double dual = norm(gen, riesz_forward(gen, u), NormKind::f12_dual());
        max_norm_gap = std::max(
            max_norm_gap, std::abs(dual - f12) / std::max(1.0, f12));
        Field round = riesz_inverse(gen, riesz_forward(gen, u));
        max_round_trip = std::max(
            max_round_trip, (round.values() - u.values()).cwiseAbs().maxCoeff());
        IsometryReport probe = l2_isometry_check(gen, u);
        max_probe_gap = std::max(max_probe_gap, std::abs(probe.gap));
    }
    pass = max_norm_gap <= 1e-10 && max_round_trip <= 1e-10 &&
           max_probe_gap <= 1e-10;
    json j;
    j["samples"] = samples;
    j["max_relative_norm_gap"] = max_norm_gap;
    j["max_round_trip_error"] = max_round_trip;
    j["max_duality_probe_gap"] = max_probe_gap;
    j["tolerance"] = 1e-10;
    j["pass"] = pass;
    return j;
}

json verify_gamma(const Generator& gen, std::uint64_t seed, bool& pass) {
    double worst = 0.0;
    for (double r : {1.0, 2.0}) {
        for (int i = 0; i < 20; ++i) {
            Field f = random_field(gen, seed + 1, static_cast<std::uint64_t>(i));
            GammaTransformResult gt = gamma_transform(gen, r, f);
            worst = std::max(worst,
                             l2_norm(gt.spectral - gt.quadrature) /
                                 std::max(1.0, l2_norm(f)));
        }
    }
    pass = worst <= 1e-6;
    json j;
    j["orders"] = {1.0, 2.0};
    j["max_route_gap"] = worst;
    j["tolerance"] = 1e-6;
    j["pass"] = pass;
    return j;
}

// Positivity via the heat kernel columns (images of site indicators) and
// mass via P_t 1; conservative exactly when L annihilates constants.
json verify_sub_markov(const Generator& gen, bool& pass) {
    const SpacePtr& space = gen.space();
    Field one = Field::constant(space, 1.0);
    const bool conservative = l2_norm(gen.apply(one)) <= 1e-10;
    double min_kernel = 0.0, max_mass = 1.0, max_mass_defect = 0.0;
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
        for (Eigen::Index i = 0; i < space->size(); ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(space->size());
            e[i] = 1.0;
            Field col = semigroup_apply(gen, t, Field(space, e));
            min_kernel = std::min(min_kernel, col.values().minCoeff());
        }
        Field mass = semigroup_apply(gen, t, one);
        max_mass = std::max(max_mass, mass.values().maxCoeff());
        if (conservative)
            max_mass_defect = std::max(
                max_mass_defect,
                (mass.values().array() - 1.0).abs().maxCoeff());
    }
    pass = min_kernel >= -1e-12 && max_mass <= 1.0 + 1e-12 &&
           max_mass_defect <= 1e-9;
    json j;
    j["times"] = {0.01, 0.1, 1.0, 10.0};
    j["min_kernel_entry"] = min_kernel;
    j["max_mass"] = max_mass;
    j["conservative"] = conservative;
    j["max_mass_defect"] = max_mass_defect;
    j["pass"] = pass;
    return j;
}

}  // namespace

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::uint64_t hash = 0xcbf29ce484222325ull;
    char c;
    while (in.get(c)) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash));
    return buf;
}

int cmd_verify(const std::string& config_path, const CliOverrides& overrides) {
    std::optional<Settings> maybe;
    try {
        maybe.emplace(load_settings(config_path, overrides));
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    }
    Settings& s = *maybe;
    const Scenario& sc = s.scenario;
    const auto t0 = std::chrono::steady_clock::now();

    json report;
    report["tool_version"] = kToolVersion;
    report["config_checksum_fnv1a64"] = file_checksum(config_path);
    std::vector<CheckLine> lines;
    auto add = [&](const std::string& name, bool applicable, bool pass,
                   json detail) {
        lines.push_back({name, applicable, pass});
        detail["applicable"] = applicable;
        report["checks"][name] = std::move(detail);
        print_check(lines.back());
    };

    bool riesz_ok = false;
    json riesz_detail = verify_riesz(sc.gen, s.seed, 200, riesz_ok);
    add("riesz_isometry", true, riesz_ok, std::move(riesz_detail));

    bool gamma_ok = false;
    json gamma_detail = verify_gamma(sc.gen, s.seed, gamma_ok);
    add("gamma_transform", true, gamma_ok, std::move(gamma_detail));

    bool markov_ok = false;
    json markov_detail = verify_sub_markov(sc.gen, markov_ok);
    add("sub_markov", true, markov_ok, std::move(markov_detail));

    H1Report h1 = check_h1(sc.psi, sampling_grid(8.0, 401));
    json h1j;
    h1j["psi_zero_residual"] = h1.psi_zero_residual;
    h1j["max_monotonicity_violation"] = h1.max_monotonicity_violation;
    h1j["measured_lipschitz"] = h1.measured_lipschitz;
    h1j["claimed_lipschitz"] = sc.psi.lipschitz;
    h1j["measured_coercivity"] = h1.measured_coercivity;
    h1j["pass"] = h1.pass;
    add("h1_nonlinearity", true, h1.pass, std::move(h1j));

    H2Report h2 = verify_h2(sc.gen, sc.noise, 200, s.seed);
    json h2j;
    h2j["claimed_c1"] = h2.claimed_c1;
    h2j["claimed_c2"] = h2.claimed_c2;
    h2j["measured_c1"] = h2.measured_c1;
    h2j["measured_c2"] = h2.measured_c2;
    h2j["samples"] = h2.samples;
    h2j["pass"] = h2.pass;
    add("h2_noise", true, h2.pass, std::move(h2j));

    const double nu = sc.cascade.nu;
    ConditionReport hemi = check_hemicontinuity(sc.gen, sc.psi, nu, 100);
    add("hemicontinuity", hemi.applicable, hemi.pass, condition_json(hemi));
    ConditionReport mono =
        check_weak_monotonicity(sc.gen, sc.psi, sc.noise, nu, 200);
    add("weak_monotonicity", mono.applicable, mono.pass, condition_json(mono));
    ConditionReport coer = check_coercivity(sc.gen, sc.psi, sc.noise, nu, 200);
    add("coercivity", coer.applicable, coer.pass, condition_json(coer));
    ConditionReport bound = check_boundedness(sc.gen, sc.psi, nu, 200);
    add("boundedness", bound.applicable, bound.pass, condition_json(bound));

    bool all_pass = riesz_ok && gamma_ok && markov_ok && h1.pass && h2.pass;
    for (const ConditionReport* r : {&hemi, &mono, &coer, &bound})
        if (r->applicable && !r->pass) all_pass = false;
    report["pass"] = all_pass;
    report["wall_seconds"] = seconds_since(t0);

    fs::create_directories(s.output);
    write_json(s.output / "verify.json", report);
    std::cout << (all_pass ? "verify: all checks passed"
                           : "verify: checks FAILED")
              << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_run(const std::string& config_path, const CliOverrides& overrides) {
    std::optional<Settings> maybe;
    try {
        maybe.emplace(load_settings(config_path, overrides));
        maybe->scenario.cascade.validate();
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    }
    Settings& s = *maybe;
    const Scenario& sc = s.scenario;

    if (!overrides.force) {
        H1Report h1 = check_h1(sc.psi, sampling_grid(8.0, 401));
        if (!h1.pass) {
            std::cerr << "run: nonlinearity fails the monotone-Lipschitz "
                         "requirements; rerun with --force to override\n";
            return kExitCheckFailed;
        }
    }

    const auto t0 = std::chrono::steady_clock::now();
    WienerSpec wiener{std::max(sc.noise.modes(), 1), s.seed, sc.cascade.dt, 1};

    std::vector<std::optional<Trajectory>> trajs(s.paths);
    std::optional<SolverError> failure;
    double simulate_seconds = 0.0;
    {
        const auto sim0 = std::chrono::steady_clock::now();
        try {
            std::vector<Trajectory> all =
                run_ensemble(sc.gen, sc.psi, sc.noise, wiener, sc.cascade,
                             sc.x, s.paths, s.threads);
            for (int p = 0; p < s.paths; ++p) trajs[p] = std::move(all[p]);
        } catch (const SolverError& err) {
            failure = err;
            // Recover the paths that do solve so partial output survives.
            for (int p = 0; p < s.paths; ++p) {
                try {
                    trajs[p] = simulate(sc.gen, sc.psi, sc.noise, wiener,
                                        sc.cascade, sc.x, p);
                } catch (const SolverError&) {
                }
            }
        }
        simulate_seconds = seconds_since(sim0);
    }

    fs::create_directories(s.output);
    const auto write0 = std::chrono::steady_clock::now();
    json artifacts = json::array();
    for (int p = 0; p < s.paths; ++p) {
        if (!trajs[p]) continue;
        const Trajectory& traj = *trajs[p];
        char name[32];
        std::snprintf(name, sizeof(name), "path_%03d.csv", p);
        std::ofstream out(s.output / name);
        out << "path,step,t,l2_norm,f12dual_norm,f12_norm,psi_l2_norm\n";
        for (std::size_t n = 0; n < traj.times.size(); ++n)
            out << p << "," << n << "," << fmt17(traj.times[n]) << ","
                << fmt17(traj.l2_trace[n]) << ","
                << fmt17(traj.f12dual_trace[n]) << ","
                << fmt17(traj.f12_trace[n]) << ","
                << fmt17(traj.psi_l2_trace[n]) << "\n";
        artifacts.push_back(name);
        if (sc.export_states) {
            std::snprintf(name, sizeof(name), "states_%03d.csv", p);
            std::ofstream st(s.output / name);
            st << "path,step,t,site,value\n";
            for (std::size_t n = 0; n < traj.times.size(); ++n)
                for (Eigen::Index i = 0; i < traj.states[n].size(); ++i)
                    st << p << "," << n << "," << fmt17(traj.times[n]) << ","
                       << i << "," << fmt17(traj.states[n][i]) << "\n";
            artifacts.push_back(name);
        }
    }

    json manifest = manifest_base(config_path, s);
    manifest["command"] = "run";
    manifest["artifacts"] = artifacts;
    manifest["status"] = failure ? "solver_error" : "ok";
    if (failure) {
        manifest["error"]["message"] = failure->what();
        manifest["error"]["step"] = failure->step;
        manifest["error"]["iterations"] = failure->iterations;
        manifest["error"]["residual"] = failure->residual;
    }
    // Timings vary run to run; the reproducibility contract covers the CSV
    // artifacts only.
    manifest["timings"]["simulate_seconds"] = simulate_seconds;
    manifest["timings"]["write_seconds"] = seconds_since(write0);
    manifest["timings"]["wall_seconds"] = seconds_since(t0);
    write_json(s.output / "manifest.json", manifest);

    if (failure) {
        std::cerr << "run: solver failed at step " << failure->step << ": "
                  << failure->what() << " (partial outputs retained)\n";
        return kExitCheckFailed;
    }
    std::cout << "run: wrote " << artifacts.size() << " artifact(s) to "
              << s.output.string() << "\n";
    return kExitOk;
}

int cmd_study(const std::string& config_path, const CliOverrides& overrides) {
    std::optional<Settings> maybe;
    try {
        maybe.emplace(load_settings(config_path, overrides));
        if (!maybe->scenario.study)
            throw ConfigError("study: config has no study block");
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    }
    Settings& s = *maybe;
    const Scenario& sc = s.scenario;
    const StudyConfig& st = *sc.study;

    StudySpec spec;
    spec.base = sc.cascade;
    spec.axis = st.axis;
    spec.values = st.values;
    spec.paths = overrides.paths.value_or(st.paths);
    spec.common_noise = st.common_noise;
    spec.seed = s.seed;
    spec.threads = s.threads;

    const auto t0 = std::chrono::steady_clock::now();
    StudyReport report;
    std::string axis_name;
    try {
        spec.validate();
        switch (spec.axis) {
            case StudyAxis::Lambda:
                axis_name = "lambda";
                report = lambda_cauchy_study(sc.gen, sc.psi, sc.noise, spec,
                                             sc.x);
                break;
            case StudyAxis::Nu:
                axis_name = "nu";
                report = nu_cauchy_study(sc.gen, sc.psi, sc.noise, spec, sc.x);
                break;
            case StudyAxis::Dt:
                axis_name = "dt";
                report =
                    dt_refinement_study(sc.gen, sc.psi, sc.noise, spec, sc.x);
                break;
        }
    } catch (const std::invalid_argument& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kExitConfigError;
    }

    fs::create_directories(s.output);
    json doc = manifest_base(config_path, s);
    doc["command"] = "study";
    doc["axis"] = axis_name;
    doc["paths"] = spec.paths;
    doc["slope"] = report.slope;
    doc["slope_halfwidth"] = report.slope_halfwidth;
    doc["threshold"] = report.threshold;
    doc["pass"] = report.pass;
    for (const AxisPoint& p : report.points)
        doc["points"].push_back({{"value", p.value},
                                 {"statistic", p.statistic},
                                 {"standard_error", p.standard_error}});
    doc["timings"]["wall_seconds"] = seconds_since(t0);
    write_json(s.output / "report.json", doc);

    std::ofstream csv(s.output / "report.csv");
    csv << "axis,axis_value,statistic,standard_error,slope\n";
    for (const AxisPoint& p : report.points)
        csv << axis_name << "," << fmt17(p.value) << "," << fmt17(p.statistic)
            << "," << fmt17(p.standard_error) << "," << fmt17(report.slope)
            << "\n";

    std::cout << "study " << axis_name << ": slope " << report.slope
              << " (threshold " << report.threshold << ") -> "
              << (report.pass ? "pass" : "FAIL") << "\n";
    return report.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace spml
