#include "tag/cli/manifest.hpp"

#include <openssl/evp.h>

#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tag/error.hpp"

#ifndef TAG_VERSION_STRING
#define TAG_VERSION_STRING "unknown"
#endif

namespace tag {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read input: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string tool_version() { return TAG_VERSION_STRING; }

void write_manifest(const std::string& path, const RunManifest& m) {
  nlohmann::ordered_json j;
  j["format_version"] = kManifestFormatVersion;
  j["command"] = m.command;
  j["argv"] = m.argv;
  j["config"] = m.config;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["inputs"] = m.input_digests;
  j["started"] = m.started;
  j["finished"] = m.finished.empty() ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(m.finished);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write manifest: " + path);
  out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.at("format_version") != kManifestFormatVersion) {
      throw ValidationError("unsupported manifest version in " + path);
    }
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.argv = j.at("argv").get<std::vector<std::string>>();
    m.config = j.at("config").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.input_digests = j.at("inputs").get<std::map<std::string, std::string>>();
    m.started = j.at("started").get<std::string>();
    if (!j.at("finished").is_null()) m.finished = j.at("finished").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed manifest " + path + ": " + e.what());
  }
}

}  // namespace tag
