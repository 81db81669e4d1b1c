#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/core/digest.hpp"
#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"

namespace rigour::app {

namespace fs = std::filesystem;

/// Relative path to digest, ordered by path.
using DigestMap = std::map<std::string, std::string>;

struct StageRecord {
  std::string name;
  std::string status;  ///< completed | cached | failed
  std::string signature;
  DigestMap inputs;
  DigestMap outputs;
  std::vector<std::string> providers;
  std::string started_at;
  std::string finished_at;
  std::optional<std::string> error;
};

struct RunManifest {
  nlohmann::ordered_json config;
  std::map<std::string, std::string> providers;
  std::vector<StageRecord> stages;

  const StageRecord* find(std::string_view name) const {
    for (const auto& s : stages) {
      if (s.name == name) return &s;
    }
    return nullptr;
  }

  bool completed(std::string_view name) const {
    const auto* s = find(name);
    return s && s->status != "failed";
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Digest of a file, or of every regular file below a directory (relative
/// path and content, in path order).
inline std::string path_digest(const fs::path& p) {
  if (fs::is_regular_file(p)) return digest::file_sha256(p);
  if (!fs::is_directory(p)) throw MissingStageOutput(p.generic_string());
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  digest::Sha256 h;
  for (const auto& f : files) h.field(fs::relative(f, p).generic_string()).field(digest::file_sha256(f));
  return h.hex();
}

inline nlohmann::ordered_json to_json(const StageRecord& s) {
  nlohmann::ordered_json j;
  j["name"] = s.name;
  j["status"] = s.status;
  j["signature"] = s.signature;
  j["inputs"] = s.inputs;
  j["outputs"] = s.outputs;
  j["providers"] = s.providers;
  j["started_at"] = s.started_at;
  j["finished_at"] = s.finished_at;
  if (s.error) j["error"] = *s.error;
  return j;
}

inline nlohmann::ordered_json to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["config"] = m.config;
  j["providers"] = m.providers;
  j["stages"] = nlohmann::ordered_json::array();
  for (const auto& s : m.stages) j["stages"].push_back(to_json(s));
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::json& j) {
  RunManifest m;
  try {
    m.config = j.at("config");
    m.providers = j.value("providers", std::map<std::string, std::string>{});
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.name = s.at("name").get<std::string>();
      r.status = s.at("status").get<std::string>();
      r.signature = s.value("signature", "");
      r.inputs = s.value("inputs", DigestMap{});
      r.outputs = s.value("outputs", DigestMap{});
      r.providers = s.value("providers", std::vector<std::string>{});
      r.started_at = s.value("started_at", "");
      r.finished_at = s.value("finished_at", "");
      if (s.contains("error")) r.error = s["error"].get<std::string>();
      m.stages.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

inline std::optional<RunManifest> load_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) return std::nullopt;
  try {
    return manifest_from_json(nlohmann::json::parse(files::read(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("manifest is not valid JSON: ") + e.what());
  }
}

/// Serializes manifest writes from concurrent stages.
class ManifestWriter {
 public:
  explicit ManifestWriter(fs::path path) : path_(std::move(path)) {}

  void write(const RunManifest& m) {
    std::lock_guard lock(mutex_);
    files::write(path_, to_json(m).dump(2) + "\n");
  }

  const fs::path& path() const noexcept { return path_; }

 private:
  fs::path path_;
  std::mutex mutex_;
};

}  // namespace rigour::app
