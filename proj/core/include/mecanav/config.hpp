#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "mecanav/world_sim.hpp"

namespace mecanav {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fully resolved run configuration. The explicit_* flags record whether
/// the file set the corresponding field, so experiment drivers can install
/// their canonical path and landmark layout without clobbering a deliberate
/// user choice.
struct RunConfig {
  ScenarioConfig scenario;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  bool explicit_path = false;
  bool explicit_landmarks = false;

  void validate() const { scenario.validate(); }
};

/// All defaults: 144x144 field with the standard top/bottom landmark rows,
/// figure7 path, 70 degree camera, 0.001/0.01 clock pair, nominal noise.
RunConfig default_config();

/// Parses and validates configuration text. Angles in the file are degrees.
/// Unknown keys are rejected with their JSON path; parse errors carry
/// line/column. `source_name` labels error messages.
RunConfig parse_config(const std::string& text,
                       const std::string& source_name);

/// Reads, parses, and validates a configuration file. An empty or
/// whitespace-only file yields default_config().
RunConfig load_config(const std::string& file_path);

/// Renders the fully resolved configuration (defaults applied, path inlined)
/// as deterministic JSON, suitable for writing next to run outputs and
/// feeding back through parse_config.
std::string render_config(const RunConfig& config);

}  // namespace mecanav
