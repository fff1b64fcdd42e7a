#pragma once

#include "spml/config.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace spml {

/// Exit codes shared by all subcommands: 0 success, 1 check failure,
/// 2 configuration error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfigError = 2;

inline constexpr const char* kToolVersion = "0.1.0";

/// Scalar overrides the CLI may apply on top of a config file.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> paths;
    std::optional<int> threads;
    std::optional<std::string> output;
    std::optional<std::string> axis;
    bool force = false;
};

/// Runs the full verification bundle (Riesz/isometry identities,
/// sub-Markov suite, gamma-transform cross-check, the nonlinearity and
/// noise requirement checks, the four variational conditions) and writes
/// verify.json.
int cmd_verify(const std::string& config_path, const CliOverrides& overrides);

/// Simulates the configured ensemble and writes per-path trajectory CSVs
/// plus a manifest.
int cmd_run(const std::string& config_path, const CliOverrides& overrides);

/// Runs the configured parameter study and writes report JSON + CSV.
int cmd_study(const std::string& config_path, const CliOverrides& overrides);

/// FNV-1a 64-bit checksum of a file's bytes, hex-encoded.
std::string file_checksum(const std::string& path);

}  // namespace spml
