#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "sirl/simulator.hpp"

namespace sirl {

/// Parses the JSON experiment schema (see presets/*.json). Every field is
/// required except `uub`; errors carry the dotted field path.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Directory holding <name>.json presets. $SIRL_PRESET_DIR overrides the
/// build-time default.
std::filesystem::path preset_dir();
ExperimentConfig load_preset(const std::string& name);

bool equivalent(const ExperimentConfig& a, const ExperimentConfig& b);

}  // namespace sirl
