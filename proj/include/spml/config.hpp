#pragma once

#include "spml/experiments.hpp"
#include "spml/generator.hpp"
#include "spml/noise.hpp"
#include "spml/nonlinearity.hpp"
#include "spml/solver.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace spml {

/// Configuration problems carry the offending field path; the CLI maps
/// them to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct StudyConfig {
    StudyAxis axis = StudyAxis::Lambda;
    std::vector<double> values;
    int paths = 64;
    bool common_noise = true;
};

/// Everything one config file describes: space + generator, nonlinearity,
/// noise, cascade parameters and initial data, plus optional study axis.
struct Scenario {
    Generator gen;
    Nonlinearity psi;
    NoiseOperator noise;
    std::uint64_t seed = 0;
    CascadeConfig cascade;
    Field x;
    std::optional<StudyConfig> study;
    int paths = 4;
    std::string output_dir = "out";
    bool export_states = false;
};

/// Parses and validates a config document (schema 1). Throws ConfigError
/// with a field-anchored message on any invalid input.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::string& path);

/// Builds just the generator part of a config ("operator" object).
Generator load_generator(const nlohmann::json& spec);
Nonlinearity load_nonlinearity(const nlohmann::json& spec);
NoiseOperator load_noise(const nlohmann::json& spec);

}  // namespace spml
