#include "spml/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Spectral toolkit for degenerate stochastic diffusion "
                 "equations on finite measure spaces"};
    app.require_subcommand(1);

    std::string config_path;
    spml::CliOverrides overrides;
    std::uint64_t seed = 0;
    int paths = 0, threads = 0;
    std::string output, axis;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "JSON config file")
            ->required()
            ->check(CLI::ExistingFile);
        cmd->add_option("--seed", seed, "Override the random seed");
        cmd->add_option("--paths", paths, "Override the number of sample paths")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--threads", threads, "Worker threads for path parallelism")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--output", output, "Override the output directory");
    };

    CLI::App* verify = app.add_subcommand(
        "verify", "Check the structural identities and standing conditions");
    add_common(verify);

    CLI::App* run = app.add_subcommand(
        "run", "Simulate the configured ensemble and write trajectory CSVs");
    add_common(run);
    run->add_flag("--force", overrides.force,
                  "Run even if the nonlinearity fails its checks");

    CLI::App* study = app.add_subcommand(
        "study", "Run the configured parameter study and fit the rate");
    add_common(study);
    study->add_option("--axis", axis, "Study axis: lambda, nu or dt")
        ->check(CLI::IsMember({"lambda", "nu", "dt"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : spml::kExitConfigError;
    }

    CLI::App* cmd = app.get_subcommands().front();
    if (cmd->count("--seed")) overrides.seed = seed;
    if (cmd->count("--paths")) overrides.paths = paths;
    if (cmd->count("--threads")) overrides.threads = threads;
    if (cmd->count("--output")) overrides.output = output;
    if (cmd == study && study->count("--axis")) overrides.axis = axis;

    try {
        if (cmd == verify) return spml::cmd_verify(config_path, overrides);
        if (cmd == run) return spml::cmd_run(config_path, overrides);
        return spml::cmd_study(config_path, overrides);
    } catch (const spml::ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return spml::kExitConfigError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return spml::kExitCheckFailed;
    }
}
