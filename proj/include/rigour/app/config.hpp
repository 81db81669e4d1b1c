#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/certainty/labeling.hpp"
#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"
#include "rigour/features/logistic.hpp"
#include "rigour/features/matrix.hpp"
#include "rigour/features/ranking.hpp"
#include "rigour/mask/keywords.hpp"
#include "rigour/salience/scoring.hpp"
#include "rigour/salience/search.hpp"

namespace rigour::app {

namespace fs = std::filesystem;

struct IngestConfig {
  std::optional<fs::path> input;  ///< JSONL file or directory of raw text files
  std::optional<fs::path> headings;
  std::optional<fs::path> metadata_patterns;
  bool strip = true;
  std::optional<fs::path> predictions;  ///< fills missing labels
  std::optional<std::array<double, 3>> split;
};

struct MaskConfig {
  std::size_t k = mask::kDefaultKeywordsPerDocument;
  bool per_corpus = false;
};

struct KeywordsConfig {
  std::size_t min_df = features::kDefaultMinDf;
  double percentile = features::kDefaultPercentile;
  std::size_t top_k = features::kDefaultTopK;
  double l2_lambda = 1e-2;
  double tol = 1e-6;
  std::size_t max_iters = 5000;
  std::optional<fs::path> allowlist;
};

struct DefineConfig {
  std::optional<fs::path> registry;  ///< base registry; the shipped default when unset
  std::vector<std::string> keywords;
  std::size_t from_keywords = 0;  ///< top positive keywords to define
  bool review = false;
  std::optional<fs::path> approved;
  std::size_t max_in_flight = 4;
};

struct ProviderConfig {
  std::string provider = "mock";  ///< mock | http (| jsonl for certainty)
  std::string model;
  std::optional<std::string> base_url;
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 4;
};

struct EmbedConfig : ProviderConfig {
  std::size_t dim = 256;
  std::uint64_t seed = 0;
  std::size_t max_tokens = 4096;
  bool supports_instruction = true;
};

struct SalienceConfig {
  salience::ScoringMode mode = salience::ScoringMode::Appended;
  std::size_t top = salience::kDefaultTopM;
  double alpha = salience::kDefaultAlpha;
  bool require_significance = true;
  bool greedy = false;
  std::vector<std::string> criteria;  ///< registry subset; all when empty
};

struct SentencesConfig {
  double threshold = certainty::kDefaultThreshold;
  bool best_set_only = true;
};

struct CertaintyConfig : ProviderConfig {
  std::optional<fs::path> predictions;
  std::vector<fs::path> intersection;  ///< run directories whose criteria are intersected
};

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"ingest", "mask",      "keywords",  "define", "embed",
                                                 "salience", "sentences", "certainty", "report"};
  return names;
}

struct Config {
  std::uint64_t seed = 7;
  fs::path out_dir = "run";
  std::optional<fs::path> cache_dir;
  std::vector<std::string> stages = stage_names();
  IngestConfig ingest;
  MaskConfig mask;
  KeywordsConfig keywords;
  DefineConfig define;
  EmbedConfig embed;
  ProviderConfig chat;
  SalienceConfig salience;
  SentencesConfig sentences;
  CertaintyConfig certainty;
};

namespace detail {

inline bool looks_like_credential(std::string_view key) {
  const auto k = text::lower(key);
  for (std::string_view bad : {"api_key", "apikey", "secret", "password", "authorization", "bearer"}) {
    if (k.find(bad) != std::string::npos) return true;
  }
  return k == "key" || k == "token" || k.ends_with("_token");
}

class Reader {
 public:
  Reader(const nlohmann::json& j, std::string where, fs::path base)
      : j_(j), where_(std::move(where)), base_(std::move(base)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where_ + "." + key + " has the wrong type");
    }
  }

  template <typename T>
  void get(const char* key, std::optional<T>& out) {
    T v{};
    seen_.insert(key);
    if (!j_.contains(key) || j_[key].is_null()) return;
    get(key, v);
    out = std::move(v);
  }

  void path(const char* key, std::optional<fs::path>& out) {
    std::optional<std::string> s;
    get(key, s);
    if (s) out = resolve(*s);
  }

  void paths(const char* key, std::vector<fs::path>& out) {
    std::vector<std::string> v;
    get(key, v);
    for (const auto& s : v) out.push_back(resolve(s));
  }

  const nlohmann::json* section(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  fs::path resolve(const std::string& s) const {
    fs::path p(s);
    return p.is_absolute() || base_.empty() ? p : base_ / p;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (looks_like_credential(k)) {
        throw ConfigError(where_ + "." + k + ": credentials are read from the environment only");
      }
      if (!seen_.contains(k)) throw ConfigError("unknown key " + where_ + "." + k);
    }
  }

  const std::string& where() const noexcept { return where_; }
  const fs::path& base() const noexcept { return base_; }

 private:
  const nlohmann::json& j_;
  std::string where_;
  fs::path base_;
  std::set<std::string> seen_;
};

inline void read_provider(Reader& r, ProviderConfig& p, std::initializer_list<std::string_view> allowed) {
  r.get("provider", p.provider);
  if (std::find(allowed.begin(), allowed.end(), p.provider) == allowed.end()) {
    throw ConfigError(r.where() + ".provider: unsupported value '" + p.provider + "'");
  }
  r.get("model", p.model);
  r.get("base_url", p.base_url);
  r.get("batch_size", p.batch_size);
  r.get("max_in_flight", p.max_in_flight);
  if (p.batch_size == 0 || p.max_in_flight == 0) throw ConfigError(r.where() + ": batch_size and max_in_flight must be positive");
}

}  // namespace detail

/// Validates and reads a config document. Relative paths resolve against base.
inline Config config_from_json(const nlohmann::json& j, const fs::path& base = {}) {
  Config c;
  detail::Reader top(j, "config", base);
  top.get("seed", c.seed);
  std::optional<fs::path> out;
  top.path("out_dir", out);
  if (out) c.out_dir = *out;
  top.path("cache_dir", c.cache_dir);
  top.get("stages", c.stages);
  for (const auto& s : c.stages) {
    const auto& all = stage_names();
    if (std::find(all.begin(), all.end(), s) == all.end()) throw ConfigError("unknown stage '" + s + "'");
  }

  if (auto* s = top.section("ingest")) {
    detail::Reader r(*s, "ingest", base);
    r.path("input", c.ingest.input);
    r.path("headings", c.ingest.headings);
    r.path("metadata_patterns", c.ingest.metadata_patterns);
    r.get("strip", c.ingest.strip);
    r.path("predictions", c.ingest.predictions);
    std::optional<std::vector<double>> split;
    r.get("split", split);
    if (split) {
      if (split->size() != 3) throw ConfigError("ingest.split needs three ratios");
      c.ingest.split = std::array<double, 3>{(*split)[0], (*split)[1], (*split)[2]};
    }
    r.finish();
  }
  if (auto* s = top.section("mask")) {
    detail::Reader r(*s, "mask", base);
    r.get("k", c.mask.k);
    r.get("per_corpus", c.mask.per_corpus);
    if (c.mask.k == 0) throw ConfigError("mask.k must be at least 1");
    r.finish();
  }
  if (auto* s = top.section("keywords")) {
    detail::Reader r(*s, "keywords", base);
    r.get("min_df", c.keywords.min_df);
    r.get("percentile", c.keywords.percentile);
    r.get("top_k", c.keywords.top_k);
    r.get("l2_lambda", c.keywords.l2_lambda);
    r.get("tol", c.keywords.tol);
    r.get("max_iters", c.keywords.max_iters);
    r.path("allowlist", c.keywords.allowlist);
    if (!(c.keywords.percentile > 0 && c.keywords.percentile <= 100)) throw ConfigError("keywords.percentile must be in (0, 100]");
    if (!(c.keywords.l2_lambda >= 0)) throw ConfigError("keywords.l2_lambda must be non-negative");
    r.finish();
  }
  if (auto* s = top.section("define")) {
    detail::Reader r(*s, "define", base);
    r.path("registry", c.define.registry);
    r.get("keywords", c.define.keywords);
    r.get("from_keywords", c.define.from_keywords);
    r.get("review", c.define.review);
    r.path("approved", c.define.approved);
    r.get("max_in_flight", c.define.max_in_flight);
    r.finish();
  }
  if (auto* s = top.section("embed")) {
    detail::Reader r(*s, "embed", base);
    detail::read_provider(r, c.embed, {"mock", "http"});
    r.get("dim", c.embed.dim);
    r.get("seed", c.embed.seed);
    r.get("max_tokens", c.embed.max_tokens);
    r.get("supports_instruction", c.embed.supports_instruction);
    if (c.embed.dim < 2) throw ConfigError("embed.dim must be at least 2");
    r.finish();
  }
  if (auto* s = top.section("chat")) {
    detail::Reader r(*s, "chat", base);
    detail::read_provider(r, c.chat, {"mock", "http"});
    r.finish();
  }
  if (auto* s = top.section("salience")) {
    detail::Reader r(*s, "salience", base);
    std::string mode(salience::to_string(c.salience.mode));
    r.get("mode", mode);
    try {
      c.salience.mode = salience::parse_mode(mode);
    } catch (const std::exception&) {
      throw ConfigError("salience.mode: unsupported value '" + mode + "'");
    }
    r.get("top", c.salience.top);
    r.get("alpha", c.salience.alpha);
    r.get("require_significance", c.salience.require_significance);
    r.get("greedy", c.salience.greedy);
    r.get("criteria", c.salience.criteria);
    if (c.salience.top == 0) throw ConfigError("salience.top must be at least 1");
    r.finish();
  }
  if (auto* s = top.section("sentences")) {
    detail::Reader r(*s, "sentences", base);
    r.get("threshold", c.sentences.threshold);
    r.get("best_set_only", c.sentences.best_set_only);
    if (!(c.sentences.threshold > 0 && c.sentences.threshold <= 1)) throw ConfigError("sentences.threshold must be in (0, 1]");
    r.finish();
  }
  if (auto* s = top.section("certainty")) {
    detail::Reader r(*s, "certainty", base);
    detail::read_provider(r, c.certainty, {"mock", "http", "jsonl"});
    r.path("predictions", c.certainty.predictions);
    r.paths("intersection", c.certainty.intersection);
    if (c.certainty.provider == "jsonl" && !c.certainty.predictions) {
      throw ConfigError("certainty.predictions is required for the jsonl provider");
    }
    if (!c.certainty.intersection.empty() && c.certainty.intersection.size() < 2) {
      throw ConfigError("certainty.intersection needs at least two run directories");
    }
    r.finish();
  }
  top.finish();
  return c;
}

inline Config load_config(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(files::read(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j, path.parent_path());
}

namespace detail {

inline nlohmann::json opt_path(const std::optional<fs::path>& p) {
  return p ? nlohmann::json(p->generic_string()) : nlohmann::json(nullptr);
}

inline nlohmann::ordered_json provider_json(const ProviderConfig& p) {
  nlohmann::ordered_json j;
  j["provider"] = p.provider;
  j["model"] = p.model;
  j["base_url"] = p.base_url ? nlohmann::json(*p.base_url) : nlohmann::json(nullptr);
  j["batch_size"] = p.batch_size;
  j["max_in_flight"] = p.max_in_flight;
  return j;
}

}  // namespace detail

/// Fully expanded snapshot, one section per stage.
inline nlohmann::ordered_json to_json(const Config& c) {
  using detail::opt_path;
  nlohmann::ordered_json j;
  j["seed"] = c.seed;
  j["out_dir"] = c.out_dir.generic_string();
  j["cache_dir"] = opt_path(c.cache_dir);
  j["stages"] = c.stages;

  auto& in = j["ingest"];
  in["input"] = opt_path(c.ingest.input);
  in["headings"] = opt_path(c.ingest.headings);
  in["metadata_patterns"] = opt_path(c.ingest.metadata_patterns);
  in["strip"] = c.ingest.strip;
  in["predictions"] = opt_path(c.ingest.predictions);
  in["split"] = c.ingest.split ? nlohmann::json(*c.ingest.split) : nlohmann::json(nullptr);

  j["mask"] = {{"k", c.mask.k}, {"per_corpus", c.mask.per_corpus}};

  auto& kw = j["keywords"];
  kw["min_df"] = c.keywords.min_df;
  kw["percentile"] = c.keywords.percentile;
  kw["top_k"] = c.keywords.top_k;
  kw["l2_lambda"] = c.keywords.l2_lambda;
  kw["tol"] = c.keywords.tol;
  kw["max_iters"] = c.keywords.max_iters;
  kw["allowlist"] = opt_path(c.keywords.allowlist);

  auto& df = j["define"];
  df["registry"] = opt_path(c.define.registry);
  df["keywords"] = c.define.keywords;
  df["from_keywords"] = c.define.from_keywords;
  df["review"] = c.define.review;
  df["approved"] = opt_path(c.define.approved);
  df["max_in_flight"] = c.define.max_in_flight;

  auto em = detail::provider_json(c.embed);
  em["dim"] = c.embed.dim;
  em["seed"] = c.embed.seed;
  em["max_tokens"] = c.embed.max_tokens;
  em["supports_instruction"] = c.embed.supports_instruction;
  j["embed"] = std::move(em);
  j["chat"] = detail::provider_json(c.chat);

  auto& sa = j["salience"];
  sa["mode"] = std::string(salience::to_string(c.salience.mode));
  sa["top"] = c.salience.top;
  sa["alpha"] = c.salience.alpha;
  sa["require_significance"] = c.salience.require_significance;
  sa["greedy"] = c.salience.greedy;
  sa["criteria"] = c.salience.criteria;

  j["sentences"] = {{"threshold", c.sentences.threshold}, {"best_set_only", c.sentences.best_set_only}};

  auto ce = detail::provider_json(c.certainty);
  ce["predictions"] = opt_path(c.certainty.predictions);
  ce["intersection"] = nlohmann::json::array();
  for (const auto& p : c.certainty.intersection) ce["intersection"].push_back(p.generic_string());
  j["certainty"] = std::move(ce);
  return j;
}

}  // namespace rigour::app
