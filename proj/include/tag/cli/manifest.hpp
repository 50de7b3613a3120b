#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tag {

inline constexpr int kManifestFormatVersion = 1;

struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::string config;  // key=value snapshot
  std::uint64_t seed = 0;
  std::string version;
  std::map<std::string, std::string> input_digests;  // path -> sha256 hex
  std::string started;
  std::string finished;  // empty while the run is in progress
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);
// UTC, ISO 8601 with seconds.
std::string utc_timestamp();
std::string tool_version();

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace tag
