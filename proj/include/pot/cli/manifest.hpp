#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace pot::cli {

inline constexpr const char* kToolVersion = "0.1.0";

/// Reproducibility record written as manifest.json into every output
/// directory. Wall times are informational; nothing else reads the clock.
struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  /// relative path -> SHA-256 hex
  std::map<std::string, std::string> outputs;
};

std::string config_digest(const nlohmann::json& config);
nlohmann::json manifest_to_json(const RunManifest& manifest);

/// Current UTC time, ISO 8601.
std::string wall_time_utc();

/// Writes `files` (relative path -> content) under `dir`, then manifest.json
/// with their digests.
void write_output_dir(const std::filesystem::path& dir,
                      const std::vector<std::pair<std::string, std::string>>& files,
                      RunManifest manifest);

}  // namespace pot::cli
