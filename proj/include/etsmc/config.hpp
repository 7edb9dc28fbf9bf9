#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "etsmc/engine.hpp"

namespace etsmc {

/// Names of the built-in scenario presets, in listing order:
/// consensus, consensus-matched, consensus-mismatched,
/// formation, formation-matched, formation-mismatched.
const std::vector<std::string>& preset_names();

bool is_preset(const std::string& name);

/// Fully populated SimConfig for a named preset. Throws ValidationError for
/// unknown names.
SimConfig preset(const std::string& name);

/// Parse and fully validate a JSON config file. Unknown keys are rejected
/// with the offending key named. Throws ConfigFileError when the file cannot
/// be opened, ConfigParseError for malformed JSON, ValidationError for any
/// violated invariant (including a topology without a leader-rooted
/// spanning tree).
SimConfig parse_config(const std::filesystem::path& path);

/// Parse a config from JSON text (same validation as parse_config).
SimConfig parse_config_text(const std::string& text);

/// Serialize a SimConfig to JSON text. parse_config_text() of the result
/// reproduces the config exactly.
std::string config_to_json(const SimConfig& config);

}  // namespace etsmc
