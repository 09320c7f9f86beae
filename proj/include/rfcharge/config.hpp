#pragma once

// Flat key-value scenario configuration. Lines are `section.key = value`;
// an INI header `[section]` prefixes the keys that follow it. `#` and `;`
// start comments.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rfcharge/simengine.hpp"

namespace rfcharge {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(const std::string& text);
KeyValues read_config_file(const std::string& path);

/// Applies every key to `cfg`. Unknown keys and unparsable values raise
/// ConfigError naming each offending key.
void apply_config(ScenarioConfig& cfg, const KeyValues& values);

/// Complete snapshot; apply_config(default, dump_config(c)) reproduces c.
KeyValues dump_config(const ScenarioConfig& cfg);

std::string format_config(const KeyValues& values);

/// Every recognised key with a one-line description.
const std::vector<std::pair<std::string, std::string>>& config_keys();

}  // namespace rfcharge
