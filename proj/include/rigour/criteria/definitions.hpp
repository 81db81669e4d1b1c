#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rigour/core/digest.hpp"
#include "rigour/core/error.hpp"
#include "rigour/core/parallel.hpp"
#include "rigour/core/text.hpp"
#include "rigour/criteria/chat.hpp"
#include "rigour/criteria/registry.hpp"

namespace rigour::criteria {

inline constexpr std::string_view kDefinitionPromptTemplate =
    "Give the definition of \"[keyword]\" in the context of Computer science and Machine learning. "
    "In the format: [keyword]: Refers to [definition]";

inline std::string definition_prompt(std::string_view keyword) {
  if (text::trim(keyword).empty()) throw std::invalid_argument("keyword is empty");
  std::string out;
  std::string_view rest = kDefinitionPromptTemplate;
  constexpr std::string_view slot = "[keyword]";
  for (auto pos = rest.find(slot); pos != std::string_view::npos; pos = rest.find(slot)) {
    out.append(rest.substr(0, pos)).append(keyword);
    rest.remove_prefix(pos + slot.size());
  }
  out.append(rest);
  return out;
}

inline std::string format_reminder(std::string_view keyword) {
  return "\n\nReply with a single paragraph that starts exactly with \"" + std::string(keyword) + ": Refers to\".";
}

/// Pulls "Refers to ..." out of a reply shaped "<keyword>: Refers to ...".
/// Markdown emphasis, list markers and a missing keyword prefix are
/// tolerated; anything without "Refers to" at the start is rejected.
inline std::optional<std::string> parse_definition(std::string_view keyword, std::string_view raw) {
  std::string body = text::normalize_whitespace(raw);
  std::string_view s = body;
  const auto strip_markup = [&] {
    while (!s.empty() && (s.front() == '*' || s.front() == '#' || s.front() == '-' || s.front() == '_' ||
                          s.front() == '"' || text::is_space(s.front()))) {
      s.remove_prefix(1);
    }
  };
  strip_markup();
  if (s.size() >= keyword.size() && text::iequals(s.substr(0, keyword.size()), keyword)) {
    auto after = s.substr(keyword.size());
    while (!after.empty() && (after.front() == '*' || after.front() == '_' || after.front() == '"')) {
      after.remove_prefix(1);
    }
    if (!after.empty() && after.front() == ':') {
      s = after.substr(1);
      strip_markup();
    }
  }
  constexpr std::string_view lead = "refers to";
  if (s.size() <= lead.size() || !text::iequals(s.substr(0, lead.size()), lead)) return std::nullopt;
  std::string out = "Refers to" + std::string(s.substr(lead.size()));
  while (!out.empty() && (out.back() == '*' || out.back() == '"' || text::is_space(out.back()))) out.pop_back();
  if (text::trim(std::string_view(out).substr(lead.size())).empty()) return std::nullopt;
  return out;
}

/// Content address of one definition: keyword, model and the prompt text.
inline std::string definition_cache_key(std::string_view keyword, std::string_view model, std::string_view prompt) {
  digest::Sha256 h;
  h.field(keyword).field(model).field(digest::sha256_hex(prompt));
  return h.hex();
}

/// Append-only JSONL of {"key","keyword","model","definition"}.
class DefinitionCache {
 public:
  explicit DefinitionCache(std::filesystem::path path) : path_(std::move(path)) {
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      try {
        auto j = nlohmann::json::parse(line);
        entries_[j.at("key").get<std::string>()] = j.at("definition").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        continue;
      }
    }
  }

  std::optional<std::string> get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& key, std::string_view keyword, std::string_view model, const std::string& definition) {
    std::lock_guard lock(mutex_);
    if (!entries_.emplace(key, definition).second) return;
    nlohmann::ordered_json j;
    j["key"] = key;
    j["keyword"] = keyword;
    j["model"] = model;
    j["definition"] = definition;
    std::ofstream out(path_, std::ios::app);
    out << j.dump() << '\n';
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::string> entries_;
};

class DefinitionGenerator {
 public:
  /// `cache` may be null; an in-memory map still deduplicates calls.
  DefinitionGenerator(ChatProvider& provider, std::shared_ptr<DefinitionCache> cache = nullptr,
                      std::size_t max_in_flight = 4)
      : provider_(provider), cache_(std::move(cache)), max_in_flight_(max_in_flight) {}

  Criterion generate(const std::string& keyword) {
    const std::string prompt = definition_prompt(keyword);
    const std::string model = provider_.model_id();
    const std::string key = definition_cache_key(keyword, model, prompt);
    if (auto hit = lookup(key)) return make(keyword, *hit, model);

    std::string raw = provider_.complete(prompt);
    auto parsed = parse_definition(keyword, raw);
    if (!parsed) {
      raw = provider_.complete(prompt + format_reminder(keyword));
      parsed = parse_definition(keyword, raw);
    }
    if (!parsed) throw ParseError(raw);
    store(key, keyword, model, *parsed);
    return make(keyword, *parsed, model);
  }

  /// Results keep the order of `keywords`.
  std::vector<Criterion> generate_all(const std::vector<std::string>& keywords) {
    std::vector<Criterion> out(keywords.size());
    parallel_for(keywords.size(), max_in_flight_, [&](std::size_t i) { out[i] = generate(keywords[i]); });
    return out;
  }

 private:
  static Criterion make(const std::string& keyword, const std::string& definition, const std::string& model) {
    return Criterion{keyword, definition, CriterionSource::Generated, ProviderMeta{model, std::nullopt}};
  }

  std::optional<std::string> lookup(const std::string& key) {
    if (cache_) return cache_->get(key);
    std::lock_guard lock(mutex_);
    auto it = memory_.find(key);
    if (it == memory_.end()) return std::nullopt;
    return it->second;
  }

  void store(const std::string& key, std::string_view keyword, std::string_view model, const std::string& def) {
    if (cache_) {
      cache_->put(key, keyword, model, def);
      return;
    }
    std::lock_guard lock(mutex_);
    memory_.emplace(key, def);
  }

  ChatProvider& provider_;
  std::shared_ptr<DefinitionCache> cache_;
  std::size_t max_in_flight_;
  std::mutex mutex_;
  std::unordered_map<std::string, std::string> memory_;
};

/// Appends criteria whose names are not yet present.
inline CriteriaRegistry extend_registry(const CriteriaRegistry& base, const std::vector<Criterion>& extra) {
  auto all = base.criteria();
  for (const auto& c : extra) {
    if (!base.index_of(c.name)) all.push_back(c);
  }
  return CriteriaRegistry(std::move(all));
}

/// Review file: each generated criterion with "approved": false for a human
/// to flip before the definitions enter a registry.
inline nlohmann::ordered_json review_document(const std::vector<Criterion>& generated) {
  auto j = to_json(CriteriaRegistry(generated));
  for (auto& e : j["criteria"]) e["approved"] = false;
  return j;
}

inline std::vector<Criterion> approved_criteria(const nlohmann::json& review) {
  nlohmann::json kept = {{"criteria", nlohmann::json::array()}};
  if (!review.contains("criteria") || !review["criteria"].is_array()) throw SchemaError("review needs \"criteria\"");
  for (const auto& e : review["criteria"]) {
    if (e.value("approved", false)) {
      auto copy = e;
      copy.erase("approved");
      kept["criteria"].push_back(std::move(copy));
    }
  }
  return registry_from_json(kept).criteria();
}

/// Mock reply: the default-registry definition when the keyword names one,
/// otherwise a fixed template.
inline std::string mock_definition_reply(const std::string& prompt) {
  const auto open = prompt.find('"');
  const auto close = open == std::string::npos ? open : prompt.find('"', open + 1);
  const std::string keyword = close == std::string::npos ? "term" : prompt.substr(open + 1, close - open - 1);
  const auto& reg = default_registry();
  for (const auto& c : reg.criteria()) {
    if (text::iequals(c.name, keyword)) return keyword + ": " + c.definition;
  }
  return keyword + ": Refers to the role of " + text::lower(keyword) +
         " in computer science and machine learning research.";
}

}  // namespace rigour::criteria
