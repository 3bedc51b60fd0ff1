#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kslab/stepper.hpp"

// Run configuration files: one "key = value" per line, '#' starts a comment,
// bracketed section headers are allowed and ignored, so the files read as a
// flat TOML subset.  Lists are comma separated; bump centers separate points
// with ';'.  Unknown keys and malformed values are errors that carry
// file:line.  See the README for the full key table.

namespace kslab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParsedConfig {
  SimConfig sim;
  bool snapshot_images = false;  // also write 8-bit previews next to dumps
  // every accepted key=value in file order, for the run manifest
  std::vector<std::pair<std::string, std::string>> entries;
};

ParsedConfig parse_config_text(const std::string& text,
                               const std::string& name);
ParsedConfig load_config(const std::string& path);

}  // namespace kslab
