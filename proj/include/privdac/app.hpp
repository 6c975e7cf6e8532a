#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "privdac/graph.hpp"
#include "privdac/scenario.hpp"

namespace privdac {

inline constexpr int kSummarySchemaVersion = 1;

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitConfigError = 2 };

/// Where a scenario comes from plus command-line overrides.
struct ScenarioSource {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::string> builtin;
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
};

/// Load the config (or the built-in, default "paper-targets"), apply overrides, validate.
ScenarioConfig load_scenario(const ScenarioSource& source);

/// One check row of a summary.
struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/**
 * @brief Result of one command on one scenario.
 *
 * summary and manifest are what gets written as summary.json and
 * manifest.json; pass is the AND of all checks.
 */
struct CommandResult {
  std::string scenario_id;
  nlohmann::json summary;
  nlohmann::json manifest;
  bool pass = false;
};

/// lambda2 of L and of the decomposed Laplacian, the closed-form prediction and their gap.
nlohmann::json spectral_report(const NetworkGraph& graph, const std::string& spec);

/**
 * @name Commands
 * Each writes trace.csv (when it simulates), summary.json and manifest.json
 * into out_dir, creating it if needed. Outputs are pure functions of the
 * config, so a re-run rewrites identical bytes.
 */
///@{
CommandResult consensus_command(const ScenarioConfig& config, const std::filesystem::path& out_dir);
CommandResult attack_command(const ScenarioConfig& config, const std::filesystem::path& out_dir);
CommandResult audit_command(const ScenarioConfig& config, const std::filesystem::path& out_dir);
CommandResult formation_command(const ScenarioConfig& config, const std::filesystem::path& out_dir);
///@}

/**
 * @brief Run consensus_command on every (config, seed) pair on a worker pool.
 *
 * Run r goes to out_dir/<id>-seed<seed>/; sweep.json lists the results
 * sorted by run id. jobs = 0 means hardware concurrency.
 */
CommandResult sweep_command(const std::vector<ScenarioConfig>& configs, const std::vector<std::uint64_t>& seeds,
                            const std::filesystem::path& out_dir, std::size_t jobs);

}  // namespace privdac
