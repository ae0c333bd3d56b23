#pragma once

#include <filesystem>
#include <string>

#include "pipebot/types.hpp"

namespace pipebot {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Built-in parameter set (the published values plus documented fixtures).
Config default_config();

// Parses an INI-style file:
//   [section]
//   key = 103 mm        # unit suffixes converted to SI on load
// Unknown sections/keys and malformed quantities raise ConfigError with the
// offending line; the result is validated before it is returned.
Config load_config(const std::filesystem::path& file);

// Same parser over an in-memory document (used by tests and presets).
Config parse_config(const std::string& text, const std::string& origin = "<string>");

// Writes the default config with comments; used by `pipebot print-config`.
std::string render_default_config();

}  // namespace pipebot
