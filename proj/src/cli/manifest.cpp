#include "pot/cli/manifest.hpp"

#include <chrono>
#include <ctime>

#include "pot/chain_io.hpp"
#include "pot/crypto.hpp"

namespace pot::cli {

std::string config_digest(const nlohmann::json& config) { return to_hex(hash(config.dump())); }

nlohmann::json manifest_to_json(const RunManifest& m) {
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [path, digest] : m.outputs) outputs[path] = digest;
  return {{"tool", "pot"},
          {"tool_version", m.tool_version},
          {"command", m.command},
          {"seed", m.seed},
          {"config", m.config},
          {"config_sha256", config_digest(m.config)},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"outputs", outputs}};
}

std::string wall_time_utc() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_output_dir(const std::filesystem::path& dir,
                      const std::vector<std::pair<std::string, std::string>>& files,
                      RunManifest manifest) {
  std::filesystem::create_directories(dir);
  for (const auto& [rel, content] : files) {
    std::filesystem::path p = dir / rel;
    std::filesystem::create_directories(p.parent_path());
    write_text(p, content);
    manifest.outputs[rel] = to_hex(hash(content));
  }
  manifest.finished_at = wall_time_utc();
  write_text(dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

}  // namespace pot::cli
