#include "spml/config.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace spml {

using nlohmann::json;

namespace {

const json& require(const json& doc, const std::string& key,
                    const std::string& context) {
    auto it = doc.find(key);
    if (it == doc.end())
        throw ConfigError(context + ": missing required field '" + key + "'");
    return *it;
}

double positive(const json& v, const std::string& context) {
    if (!v.is_number())
        throw ConfigError(context + ": expected a number");
    double d = v.get<double>();
    if (!(d > 0.0)) throw ConfigError(context + ": must be positive");
    return d;
}

Eigen::VectorXd vector_of(const json& v, const std::string& context) {
    if (!v.is_array())
        throw ConfigError(context + ": expected an array of numbers");
    Eigen::VectorXd out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw ConfigError(context + "[" + std::to_string(i) +
                              "]: expected a number");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

ConductanceGraph load_graph(const json& spec, const std::string& context) {
    Eigen::VectorXd weights =
        vector_of(require(spec, "weights", context), context + ".weights");
    for (Eigen::Index i = 0; i < weights.size(); ++i)
        if (!(weights[i] > 0.0))
            throw ConfigError(context + ".weights[" + std::to_string(i) +
                              "]: must be positive");
    const Eigen::Index n = weights.size();
    ConductanceGraph graph{make_space(weights), Eigen::MatrixXd::Zero(n, n),
                           Eigen::VectorXd::Zero(n)};

    const json& edges = require(spec, "conductances", context);
    if (!edges.is_array())
        throw ConfigError(context + ".conductances: expected an array");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const std::string edge_ctx =
            context + ".conductances[" + std::to_string(e) + "]";
        const json& edge = edges[e];
        if (!edge.is_array() || edge.size() != 3)
            throw ConfigError(edge_ctx + ": expected [i, j, c]");
        auto i = edge[0].get<Eigen::Index>();
        auto j = edge[1].get<Eigen::Index>();
        double c = edge[2].get<double>();
        if (i < 0 || i >= n || j < 0 || j >= n || i == j)
            throw ConfigError(edge_ctx + ": site indices out of range");
        if (c < 0.0)
            throw ConfigError(edge_ctx + ": conductance must be nonnegative");
        graph.conductances(i, j) = c;
        graph.conductances(j, i) = c;
    }
    if (spec.contains("killing")) {
        graph.killing = vector_of(spec["killing"], context + ".killing");
        if (graph.killing.size() != n)
            throw ConfigError(context + ".killing: length mismatch");
        for (Eigen::Index i = 0; i < n; ++i)
            if (graph.killing[i] < 0.0)
                throw ConfigError(context + ".killing[" + std::to_string(i) +
                                  "]: must be nonnegative");
    }
    return graph;
}

}  // namespace

Generator load_generator(const json& spec) {
    const std::string context = "operator";
    std::string kind = require(spec, "kind", context).get<std::string>();
    if (kind == "conductance") {
        return build_conductance_generator(load_graph(spec, context));
    }
    if (kind == "weighted") {
        double h = positive(require(spec, "h", context), context + ".h");
        Eigen::VectorXd density =
            vector_of(require(spec, "density", context), context + ".density");
        for (Eigen::Index i = 0; i < density.size(); ++i)
            if (!(density[i] > 0.0))
                throw ConfigError(context + ".density[" + std::to_string(i) +
                                  "]: must be positive");
        return build_weighted_generator(density.size(), h, density);
    }
    if (kind == "fractional") {
        double alpha =
            positive(require(spec, "alpha", context), context + ".alpha");
        if (alpha > 1.0)
            throw ConfigError(context + ".alpha: must lie in (0, 1]");
        Generator base = spec.contains("base")
                             ? load_generator(spec["base"])
                             : build_conductance_generator(
                                   load_graph(spec, context));
        return fractional_power(base, alpha);
    }
    throw ConfigError(context + ".kind: unknown kind '" + kind + "'");
}

Nonlinearity load_nonlinearity(const json& spec) {
    const std::string context = "psi";
    std::string kind = require(spec, "kind", context).get<std::string>();
    if (kind == "identity") return identity_psi();
    if (kind == "linear")
        return linear_psi(positive(require(spec, "c", context), context + ".c"));
    if (kind == "saturation") return saturation_psi();
    if (kind == "dead_zone") return dead_zone_psi();
    if (kind == "porous_medium") {
        double m = positive(require(spec, "m", context), context + ".m");
        double rmax =
            positive(require(spec, "rmax", context), context + ".rmax");
        return regularized_porous_medium_psi(m, rmax);
    }
    if (kind == "breakpoints") {
        const json& table = require(spec, "breakpoints", context);
        if (!table.is_array() || table.size() < 2)
            throw ConfigError(context +
                              ".breakpoints: expected at least two [r, psi] pairs");
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t i = 0; i < table.size(); ++i) {
            if (!table[i].is_array() || table[i].size() != 2)
                throw ConfigError(context + ".breakpoints[" +
                                  std::to_string(i) + "]: expected [r, psi]");
            pairs.emplace_back(table[i][0].get<double>(),
                               table[i][1].get<double>());
        }
        try {
            return breakpoint_psi(pairs);
        } catch (const std::invalid_argument& err) {
            throw ConfigError(context + ".breakpoints: " +
                              std::string(err.what()));
        }
    }
    throw ConfigError(context + ".kind: unknown kind '" + kind + "'");
}

NoiseOperator load_noise(const json& spec) {
    const std::string context = "noise";
    NoiseOperator B;
    int modes = require(spec, "modes", context).get<int>();
    if (modes < 0) throw ConfigError(context + ".modes: must be nonnegative");
    if (modes == 0) return B;

    const json& gs = require(spec, "g", context);
    const json& gammas = require(spec, "gamma", context);
    if (!gs.is_array() || !gammas.is_array())
        throw ConfigError(context + ": 'g' and 'gamma' must be arrays");
    auto g_at = [&](std::size_t k) -> const json& {
        return gs.size() == 1 ? gs[0] : gs.at(k);
    };
    auto gamma_at = [&](std::size_t k) -> const json& {
        return gammas.size() == 1 ? gammas[0] : gammas.at(k);
    };
    if (gs.size() != 1 && gs.size() != static_cast<std::size_t>(modes))
        throw ConfigError(context + ".g: length must be 1 or `modes`");
    if (gammas.size() != 1 && gammas.size() != static_cast<std::size_t>(modes))
        throw ConfigError(context + ".gamma: length must be 1 or `modes`");

    for (int k = 0; k < modes; ++k) {
        const json& g = g_at(k);
        std::string gkind =
            require(g, "kind", context + ".g").get<std::string>();
        TimeCoefficient coeff;
        coeff.value = require(g, "value", context + ".g").get<double>();
        if (gkind == "const") {
            coeff.kind = TimeCoefficient::Kind::Const;
        } else if (gkind == "sin") {
            coeff.kind = TimeCoefficient::Kind::Sin;
            coeff.period =
                positive(require(g, "period", context + ".g"),
                         context + ".g.period");
        } else {
            throw ConfigError(context + ".g.kind: unknown kind '" + gkind + "'");
        }
        B.g.push_back(coeff);

        const json& gm = gamma_at(k);
        std::string mkind =
            require(gm, "kind", context + ".gamma").get<std::string>();
        SpectralMultiplier mult;
        if (mkind == "one") {
            mult.kind = SpectralMultiplier::Kind::One;
        } else if (mkind == "resolvent") {
            mult.kind = SpectralMultiplier::Kind::Resolvent;
            mult.power = positive(require(gm, "power", context + ".gamma"),
                                  context + ".gamma.power");
        } else {
            throw ConfigError(context + ".gamma.kind: unknown kind '" + mkind +
                              "'");
        }
        B.gamma.push_back(mult);
    }
    return B;
}

Scenario load_scenario(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    int schema = require(doc, "schema", "config").get<int>();
    if (schema != 1)
        throw ConfigError("config.schema: unsupported version " +
                          std::to_string(schema));

    Generator gen = load_generator(require(doc, "operator", "config"));
    Nonlinearity psi = load_nonlinearity(require(doc, "psi", "config"));

    NoiseOperator noise;
    std::uint64_t seed = 0;
    if (doc.contains("noise")) {
        noise = load_noise(doc["noise"]);
        if (doc["noise"].contains("seed"))
            seed = doc["noise"]["seed"].get<std::uint64_t>();
        if (noise.modes() > gen.size())
            throw ConfigError("noise.modes: exceeds the space size");
    }

    const json& cascade_spec = require(doc, "cascade", "config");
    CascadeConfig cascade;
    cascade.dt = positive(require(cascade_spec, "dt", "cascade"), "cascade.dt");
    cascade.horizon =
        require(cascade_spec, "T", "cascade").get<double>();
    if (cascade.horizon < 0.0)
        throw ConfigError("cascade.T: must be nonnegative");
    cascade.nu = cascade_spec.value("nu", 0.0);
    cascade.lambda = cascade_spec.value("lambda", 0.0);
    if (cascade.nu < 0.0) throw ConfigError("cascade.nu: must be nonnegative");
    if (cascade.lambda < 0.0)
        throw ConfigError("cascade.lambda: must be nonnegative");
    cascade.newton_tol = cascade_spec.value("newton_tol", 1e-10);
    cascade.newton_max = cascade_spec.value("newton_max", 50);
    if (!(cascade.newton_tol > 0.0))
        throw ConfigError("cascade.newton_tol: must be positive");
    if (cascade.newton_max < 1)
        throw ConfigError("cascade.newton_max: must be positive");

    Eigen::VectorXd x_values =
        vector_of(require(cascade_spec, "x", "cascade"), "cascade.x");
    if (x_values.size() != gen.size())
        throw ConfigError("cascade.x: length does not match the space size");

    Field x(gen.space(), std::move(x_values));
    Scenario scenario{std::move(gen),
                      std::move(psi),
                      std::move(noise),
                      seed,
                      cascade,
                      std::move(x),
                      std::nullopt,
                      doc.value("paths", 4),
                      doc.value("output", std::string("out")),
                      doc.value("export_states", false)};

    if (doc.contains("study")) {
        const json& st = doc["study"];
        StudyConfig study;
        std::string axis = require(st, "axis", "study").get<std::string>();
        if (axis == "lambda")
            study.axis = StudyAxis::Lambda;
        else if (axis == "nu")
            study.axis = StudyAxis::Nu;
        else if (axis == "dt")
            study.axis = StudyAxis::Dt;
        else
            throw ConfigError("study.axis: must be lambda, nu or dt");
        Eigen::VectorXd values =
            vector_of(require(st, "values", "study"), "study.values");
        if (values.size() < 2)
            throw ConfigError("study.values: need at least two values for a slope");
        for (Eigen::Index i = 0; i < values.size(); ++i) {
            if (values[i] < 0.0)
                throw ConfigError("study.values: must be nonnegative");
            if (i > 0 && values[i] >= values[i - 1])
                throw ConfigError("study.values: must be strictly decreasing");
            study.values.push_back(values[i]);
        }
        study.paths = st.value("paths", 64);
        if (study.paths < 1)
            throw ConfigError("study.paths: must be positive");
        study.common_noise = st.value("common_noise", true);
        if (study.axis != StudyAxis::Dt && !study.common_noise)
            throw ConfigError(
                "study.common_noise: Cauchy studies require common random numbers");
        scenario.study = study;
    }
    if (scenario.paths < 1) throw ConfigError("paths: must be positive");
    return scenario;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& err) {
        throw ConfigError("config parse error: " + std::string(err.what()));
    }
    return load_scenario(doc);
}

}  // namespace spml
