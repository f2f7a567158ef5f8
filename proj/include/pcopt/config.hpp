#pragma once

#include "pcopt/optimizer.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace pcopt {

/// Parses a JSON run configuration. Every key is optional; unknown keys and
/// ill-typed values throw config_error. The result is validated.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Full configuration with every field spelled out.
std::string config_to_json(const RunConfig& cfg, int indent = 2);

}  // namespace pcopt
