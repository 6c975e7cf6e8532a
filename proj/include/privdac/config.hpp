#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

#include "privdac/scenario.hpp"
#include "privdac/signal.hpp"

namespace privdac {

/**
 * @brief JSON form of a scenario.
 *
 * Agent indices (victim, target, accomplice, edge endpoints) are 1-based;
 * vector components inside signal terms are 0-based, matching the CSV
 * column suffixes. Unknown keys anywhere are a ValidationError. A document
 * may start from a built-in scenario with "base": "<name>" and override
 * any top-level section.
 */
ScenarioConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ScenarioConfig& config);

ScenarioConfig load_config(const std::filesystem::path& path);

SignalDescriptor signal_from_json(const nlohmann::json& terms, std::size_t dimension);
nlohmann::json signal_to_json(const SignalDescriptor& signal);

/// Sorted-key compact dump of config_to_json; stable across platforms.
std::string canonical_config(const ScenarioConfig& config);

/// Hex SHA-256 of canonical_config.
std::string config_hash(const ScenarioConfig& config);

}  // namespace privdac
