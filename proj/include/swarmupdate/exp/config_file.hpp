#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "swarmupdate/exp/sweep.hpp"

namespace swarmupdate::exp {

/// `key = value` pairs; later keys override earlier ones.
using Settings = std::map<std::string, std::string>;

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Throws sim::ConfigError with the line number on malformed input.
Settings parse_settings(std::istream& in);
Settings load_settings_file(const std::filesystem::path& path);

/// Every key apply_settings understands.
const std::vector<std::string>& settings_keys();

/// Applies settings onto a grid. List keys (strategy, swarm_size,
/// failure_rate, patch_packets) take comma-separated values. Unknown keys
/// and bad values throw sim::ConfigError.
void apply_settings(SweepGrid& grid, const Settings& settings);

}  // namespace swarmupdate::exp
