#pragma once

// Command-line front end. Each command resolves its flags into a JSON
// config snapshot, writes a RunManifest, then produces its outputs from the
// snapshot alone, so `replay` on a manifest reproduces the same bytes.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace subsim::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kUsageError = 2, kNumericalError = 3 };

struct RunManifest {
  std::string command;               // toy | scenario | cov-study
  nlohmann::json config_snapshot;    // fully resolved parameters
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::vector<std::string> outputs;  // paths, manifest excluded
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

/// Flag value if given, else SUBSIM_SEED (`env_value`, may be null), else 1.
/// Throws std::invalid_argument on a malformed environment value.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, const char* env_value);

/// Output paths a command will write for a given snapshot.
std::vector<std::string> planned_outputs(const std::string& command,
                                         const nlohmann::json& config);

/// Where the manifest of a snapshot goes.
std::string manifest_path(const std::string& command, const nlohmann::json& config);

/// Writes the manifest, then every output it lists.
void execute(const RunManifest& manifest, std::ostream& log);

/// Full CLI: parses `args` (without the program name), runs, maps errors to
/// exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace subsim::cli
