#include "spml/commands.hpp"
#include "spml/config.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace spml;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json two_point_doc() {
    return json{
        {"schema", 1},
        {"operator",
         {{"kind", "conductance"},
          {"weights", {1.0, 1.0}},
          {"conductances", {{0, 1, 1.0}}}}},
        {"psi", {{"kind", "identity"}}},
        {"noise",
         {{"modes", 1},
          {"g", {{{"kind", "const"}, {"value", 0.5}}}},
          {"gamma", {{{"kind", "one"}}}},
          {"seed", 7}}},
        {"cascade",
         {{"dt", 1e-2}, {"T", 0.1}, {"x", {1.0, -0.5}}}},
        {"paths", 3}};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() /
               ("spml_test_" + tag + "_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string write_config(const fs::path& dir, const json& doc,
                         const std::string& name = "config.json") {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << doc.dump(2);
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("a complete scenario round-trips through the loader") {
    Scenario sc = load_scenario(two_point_doc());
    CHECK(sc.gen.size() == 2);
    CHECK(sc.psi.name == "identity");
    CHECK(sc.noise.modes() == 1);
    CHECK(sc.seed == 7);
    CHECK(sc.paths == 3);
    CHECK(sc.cascade.dt == 1e-2);
    CHECK(sc.x.values()[0] == 1.0);
    CHECK_FALSE(sc.study.has_value());
}

TEST_CASE("loader errors name the offending field") {
    json doc = two_point_doc();
    doc["operator"]["conductances"][0][2] = -1.0;
    try {
        load_scenario(doc);
        FAIL("expected a config error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("conductances") !=
              std::string::npos);
    }

    doc = two_point_doc();
    doc["psi"]["kind"] = "mystery";
    CHECK_THROWS_WITH_AS(load_scenario(doc),
                         "psi.kind: unknown kind 'mystery'", ConfigError);

    doc = two_point_doc();
    doc["cascade"]["x"] = {1.0};
    try {
        load_scenario(doc);
        FAIL("expected a config error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("cascade.x") != std::string::npos);
    }

    doc = two_point_doc();
    doc["schema"] = 2;
    CHECK_THROWS_AS(load_scenario(doc), ConfigError);

    doc = two_point_doc();
    doc["noise"]["modes"] = 5;  // exceeds the two-site space
    CHECK_THROWS_AS(load_scenario(doc), ConfigError);

    doc = two_point_doc();
    doc["study"] = {{"axis", "lambda"}, {"values", {0.1}}};
    try {
        load_scenario(doc);
        FAIL("expected a config error");
    } catch (const ConfigError& err) {
        CHECK(std::string(err.what()).find("study.values") !=
              std::string::npos);
    }
}

TEST_CASE("generator kinds load with their parameters") {
    json frac = {{"kind", "fractional"},
                 {"alpha", 0.5},
                 {"base",
                  {{"kind", "conductance"},
                   {"weights", {1.0, 1.0, 1.0}},
                   {"conductances", {{0, 1, 1.0}, {1, 2, 1.0}}}}}};
    Generator g = load_generator(frac);
    CHECK(g.kind() == GeneratorKind::Fractional);
    CHECK(g.size() == 3);

    json weighted = {{"kind", "weighted"},
                     {"h", 0.5},
                     {"density", {1.0, 1.5, 2.0}}};
    CHECK(load_generator(weighted).kind() == GeneratorKind::WeightedDensity);
}

TEST_CASE("checksums are a stable function of file bytes") {
    TempDir dir("checksum");
    fs::path p = dir.path / "data.txt";
    std::ofstream(p) << "abc";
    // FNV-1a 64 of "abc".
    CHECK(file_checksum(p.string()) == "e71fa2190541574b");
    CHECK(file_checksum(p.string()) == file_checksum(p.string()));
}

TEST_CASE("verify command accepts the shipped-style scenario") {
    TempDir dir("verify_ok");
    std::string config = write_config(dir.path, two_point_doc());
    CliOverrides overrides;
    overrides.output = (dir.path / "out").string();
    CHECK(cmd_verify(config, overrides) == kExitOk);
    CHECK(fs::exists(dir.path / "out" / "verify.json"));
}

TEST_CASE("verify command fails on a non-monotone user table") {
    TempDir dir("verify_bad");
    json doc = two_point_doc();
    doc["psi"] = {{"kind", "breakpoints"},
                  {"breakpoints", {{-1.0, 1.0}, {0.0, 0.0}, {1.0, -1.0}}}};
    std::string config = write_config(dir.path, doc);
    CliOverrides overrides;
    overrides.output = (dir.path / "out").string();
    CHECK(cmd_verify(config, overrides) == kExitCheckFailed);
}

TEST_CASE("commands map configuration problems to exit code 2") {
    TempDir dir("config_err");
    json doc = two_point_doc();
    doc["operator"]["conductances"][0][2] = -2.0;
    std::string config = write_config(dir.path, doc);
    CliOverrides overrides;
    CHECK(cmd_verify(config, overrides) == kExitConfigError);
    CHECK(cmd_run(config, overrides) == kExitConfigError);
    CHECK(cmd_study(config, overrides) == kExitConfigError);
    CHECK(cmd_run((dir.path / "missing.json").string(), overrides) ==
          kExitConfigError);
}

TEST_CASE("run command is reproducible across thread counts") {
    TempDir dir("run_repro");
    std::string config = write_config(dir.path, two_point_doc());

    CliOverrides a;
    a.output = (dir.path / "a").string();
    a.threads = 1;
    CliOverrides b;
    b.output = (dir.path / "b").string();
    b.threads = 2;
    REQUIRE(cmd_run(config, a) == kExitOk);
    REQUIRE(cmd_run(config, b) == kExitOk);
    for (int p = 0; p < 3; ++p) {
        char name[32];
        std::snprintf(name, sizeof(name), "path_%03d.csv", p);
        std::string csv_a = slurp(dir.path / "a" / name);
        std::string csv_b = slurp(dir.path / "b" / name);
        CHECK(!csv_a.empty());
        CHECK(csv_a == csv_b);
    }
    CHECK(fs::exists(dir.path / "a" / "manifest.json"));
}

TEST_CASE("run command with zero horizon emits single-row trajectories") {
    TempDir dir("run_t0");
    json doc = two_point_doc();
    doc["cascade"]["T"] = 0.0;
    std::string config = write_config(dir.path, doc);
    CliOverrides overrides;
    overrides.output = (dir.path / "out").string();
    overrides.paths = 1;
    REQUIRE(cmd_run(config, overrides) == kExitOk);
    std::string csv = slurp(dir.path / "out" / "path_000.csv");
    // Header plus exactly one sample row.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("study command writes reports and respects slope thresholds") {
    TempDir dir("study_ok");
    json doc = two_point_doc();
    doc["noise"]["modes"] = 0;
    doc["study"] = {{"axis", "lambda"},
                    {"values", {0.1, 0.04, 0.016}},
                    {"paths", 2}};
    std::string config = write_config(dir.path, doc);
    CliOverrides overrides;
    overrides.output = (dir.path / "out").string();
    CHECK(cmd_study(config, overrides) == kExitOk);
    CHECK(fs::exists(dir.path / "out" / "report.json"));
    CHECK(fs::exists(dir.path / "out" / "report.csv"));

    // Missing study block is a configuration error.
    json bare = two_point_doc();
    std::string bare_config = write_config(dir.path, bare, "bare.json");
    CHECK(cmd_study(bare_config, overrides) == kExitConfigError);

    // An axis override that breaks the dyadic requirement is rejected.
    CliOverrides axis_override = overrides;
    axis_override.axis = "dt";
    CHECK(cmd_study(config, axis_override) == kExitConfigError);
}
