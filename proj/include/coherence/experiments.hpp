#pragma once

// Experiment runners behind the coherence_lab command line. Every command
// reads its parameters from a JSON object (filled from flags or a config
// file), writes its data files into the output directory together with a
// manifest.json, and returns a JSON summary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace coherence {

inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr const char* kSeedEnvVar = "COHERENCE_LAB_SEED";

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
  /// Command-specific parameters; unknown keys are rejected.
  nlohmann::json params = nlohmann::json::object();
};

struct CommandResult {
  nlohmann::json summary;
  /// Parameters as actually used (defaults filled in, state files inlined);
  /// this is what the manifest records.
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> warnings;
  /// Data files written, relative to the output directory, manifest last.
  std::vector<std::string> files;
};

/// {"command", "version", "seed", "config"}.
nlohmann::json manifest_for(const ExperimentConfig& cfg, const nlohmann::json& resolved_params);

/// A config file is either a bare parameter object or a manifest written by a
/// previous run. For a manifest the command must match (when given) and its
/// seed is returned through `seed`.
nlohmann::json load_config_file(const std::filesystem::path& path, const std::string& command,
                                std::optional<std::uint64_t>* seed);

/// Flag, then config/manifest seed, then COHERENCE_LAB_SEED, then 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag, std::optional<std::uint64_t> from_config);

/// "0.1,0.2" -> [0.1, 0.2]; throws ValidationError on malformed entries.
std::vector<double> parse_real_list(const std::string& text);
std::vector<std::size_t> parse_count_list(const std::string& text);

CommandResult cmd_concentrate(const ExperimentConfig& cfg);
CommandResult cmd_concat(const ExperimentConfig& cfg);
CommandResult cmd_field(const ExperimentConfig& cfg);
CommandResult cmd_bound_compare(const ExperimentConfig& cfg);
CommandResult cmd_nogo(const ExperimentConfig& cfg);
CommandResult cmd_amplify(const ExperimentConfig& cfg);

/// Dispatches on cfg.command, creating the output directory and writing the
/// manifest after the command succeeds.
CommandResult run_command(const ExperimentConfig& cfg);

const std::vector<std::string>& command_names();

}  // namespace coherence
