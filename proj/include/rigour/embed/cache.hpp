#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rigour/core/digest.hpp"
#include "rigour/embed/provider.hpp"

namespace rigour::embed {

/// Content address of one embedding: provider, mode, instruction, text.
inline std::string cache_key(std::string_view provider_id, const EmbeddingRequest& r) {
  digest::Sha256 h;
  h.field(provider_id).field(to_string(r.mode)).field(r.instruction ? "1" : "0");
  h.field(r.instruction ? std::string_view(*r.instruction) : std::string_view());
  h.field(r.text);
  return h.hex();
}

/// Append-only JSONL vector store, one {"key","dim","values"} record per
/// line. Concurrent readers, serialized writers. A truncated trailing line
/// (interrupted run) is ignored on load.
class EmbeddingCache {
 public:
  explicit EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        auto j = nlohmann::json::parse(line);
        auto values = j.at("values").get<std::vector<double>>();
        if (values.size() != j.at("dim").get<std::size_t>()) continue;
        entries_[j.at("key").get<std::string>()] = std::move(values);
      } catch (const nlohmann::json::exception&) {
        continue;
      }
    }
  }

  std::optional<std::vector<double>> get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, const std::vector<double>& values) {
    std::unique_lock lock(mutex_);
    if (entries_.contains(key)) return;
    nlohmann::json j;
    j["key"] = key;
    j["dim"] = values.size();
    j["values"] = values;
    std::ofstream out(path_, std::ios::app);
    out << j.dump() << '\n';
    out.flush();
    entries_.emplace(key, values);
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

/// Decorator that answers from the cache and forwards only misses.
class CachingEmbeddingProvider final : public EmbeddingProvider {
 public:
  CachingEmbeddingProvider(std::shared_ptr<EmbeddingProvider> inner, std::shared_ptr<EmbeddingCache> cache)
      : inner_(std::move(inner)), cache_(std::move(cache)) {}

  std::string id() const override { return inner_->id(); }
  bool supports_instruction() const override { return inner_->supports_instruction(); }
  std::size_t max_tokens() const override { return inner_->max_tokens(); }
  std::size_t count_tokens(std::string_view text) const override { return inner_->count_tokens(text); }

  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 protected:
  std::vector<std::vector<double>> do_embed(std::span<const EmbeddingRequest> requests) override {
    std::vector<std::vector<double>> out(requests.size());
    std::vector<EmbeddingRequest> missing;
    std::vector<std::size_t> missing_at;
    std::vector<std::string> keys(requests.size());
    const auto pid = inner_->id();
    for (std::size_t i = 0; i < requests.size(); ++i) {
      keys[i] = cache_key(pid, requests[i]);
      if (auto hit = cache_->get(keys[i])) {
        out[i] = std::move(*hit);
        ++hits_;
      } else {
        missing.push_back(requests[i]);
        missing_at.push_back(i);
      }
    }
    if (!missing.empty()) {
      misses_ += missing.size();
      auto fresh = inner_->embed(missing);
      for (std::size_t k = 0; k < fresh.size(); ++k) {
        cache_->put(keys[missing_at[k]], fresh[k]);
        out[missing_at[k]] = std::move(fresh[k]);
      }
    }
    return out;
  }

 private:
  std::shared_ptr<EmbeddingProvider> inner_;
  std::shared_ptr<EmbeddingCache> cache_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace rigour::embed
