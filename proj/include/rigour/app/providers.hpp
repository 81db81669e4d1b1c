#pragma once

#include <functional>
#include <memory>
#include <string>

#include "rigour/app/config.hpp"
#include "rigour/certainty/providers.hpp"
#include "rigour/core/http.hpp"
#include "rigour/criteria/chat.hpp"
#include "rigour/criteria/definitions.hpp"
#include "rigour/embed/cache.hpp"
#include "rigour/embed/http_provider.hpp"
#include "rigour/embed/mock_provider.hpp"

namespace rigour::app {

/// Environment lookups behind a seam so tests can inject values.
struct Environment {
  std::function<std::optional<std::string>(const char*)> get = [](const char* name) { return http::env(name); };
};

/// Lazily built providers for one run. Mock providers never record calls and
/// are not disk-cached; http embeddings go through the cache when a cache
/// directory is set. Credentials and base URLs come from the environment
/// (EMBED_API_KEY, CHAT_API_KEY, CERTAINTY_API_KEY, *_BASE_URL), with the
/// config's base_url as fallback.
class Providers {
 public:
  Providers(Config config, bool force_mock, Environment env = {})
      : cfg_(std::move(config)), force_mock_(force_mock), env_(std::move(env)) {}

  embed::EmbeddingProvider& embedder() {
    if (!embedder_) embedder_ = make_embedder();
    return *embedder_;
  }

  criteria::ChatProvider& chat() {
    if (!chat_) chat_ = make_chat();
    return *chat_;
  }

  certainty::CertaintyProvider& certainty() {
    if (!certainty_) certainty_ = make_certainty();
    return *certainty_;
  }

  std::shared_ptr<criteria::DefinitionCache> definition_cache() {
    if (!cfg_.cache_dir || chat_is_mock()) return nullptr;
    if (!definition_cache_) {
      fs::create_directories(*cfg_.cache_dir);
      definition_cache_ = std::make_shared<criteria::DefinitionCache>(*cfg_.cache_dir / "definitions.jsonl");
    }
    return definition_cache_;
  }

  /// Identifiers without building anything.
  std::string embed_id() {
    return embed_is_mock() ? embed::MockEmbeddingProvider(mock_options()).id() : "http/" + cfg_.embed.model;
  }
  std::string chat_id() { return chat_is_mock() ? "mock-chat" : cfg_.chat.model; }
  std::string certainty_id() {
    if (cfg_.certainty.provider == "jsonl") return "jsonl/" + cfg_.certainty.predictions->filename().string();
    return certainty_is_mock() ? "mock-certainty" : "http/" + cfg_.certainty.model;
  }

  bool embed_is_mock() const { return force_mock_ || cfg_.embed.provider == "mock"; }
  bool chat_is_mock() const { return force_mock_ || cfg_.chat.provider == "mock"; }
  bool certainty_is_mock() const { return force_mock_ ? cfg_.certainty.provider != "jsonl" : cfg_.certainty.provider == "mock"; }

 private:
  embed::MockEmbeddingOptions mock_options() const {
    embed::MockEmbeddingOptions o;
    o.dim = cfg_.embed.dim;
    o.seed = cfg_.embed.seed;
    o.supports_instruction = cfg_.embed.supports_instruction;
    o.record_calls = false;
    return o;
  }

  std::string base_url(const char* var, const ProviderConfig& p, const char* section) const {
    if (auto v = env_.get(var)) return *v;
    if (p.base_url) return *p.base_url;
    throw ConfigError(std::string(section) + ": set " + var + " or " + section + ".base_url for the http provider");
  }

  std::shared_ptr<embed::EmbeddingProvider> make_embedder() {
    if (embed_is_mock()) return std::make_shared<embed::MockEmbeddingProvider>(mock_options());
    embed::HttpEmbeddingOptions o;
    o.base_url = base_url("EMBED_BASE_URL", cfg_.embed, "embed");
    o.model = cfg_.embed.model;
    o.api_key = env_.get("EMBED_API_KEY");
    o.supports_instruction = cfg_.embed.supports_instruction;
    o.batch_size = cfg_.embed.batch_size;
    o.max_in_flight = cfg_.embed.max_in_flight;
    o.max_tokens = cfg_.embed.max_tokens;
    auto http = std::make_shared<embed::HttpEmbeddingProvider>(std::move(o));
    if (!cfg_.cache_dir) return http;
    fs::create_directories(*cfg_.cache_dir);
    auto cache = std::make_shared<embed::EmbeddingCache>(*cfg_.cache_dir / "embeddings.jsonl");
    return std::make_shared<embed::CachingEmbeddingProvider>(http, cache);
  }

  std::unique_ptr<criteria::ChatProvider> make_chat() {
    if (chat_is_mock()) return std::make_unique<criteria::MockChatProvider>(criteria::mock_definition_reply);
    criteria::HttpChatOptions o;
    o.base_url = base_url("CHAT_BASE_URL", cfg_.chat, "chat");
    o.model = cfg_.chat.model;
    o.api_key = env_.get("CHAT_API_KEY");
    return std::make_unique<criteria::HttpChatProvider>(std::move(o));
  }

  std::unique_ptr<certainty::CertaintyProvider> make_certainty() {
    if (cfg_.certainty.provider == "jsonl") {
      return std::make_unique<certainty::JsonlCertaintyProvider>(*cfg_.certainty.predictions);
    }
    if (certainty_is_mock()) return std::make_unique<certainty::MockCertaintyProvider>();
    certainty::HttpCertaintyOptions o;
    o.base_url = base_url("CERTAINTY_BASE_URL", cfg_.certainty, "certainty");
    o.model = cfg_.certainty.model;
    o.api_key = env_.get("CERTAINTY_API_KEY");
    o.batch_size = cfg_.certainty.batch_size;
    o.max_in_flight = cfg_.certainty.max_in_flight;
    return std::make_unique<certainty::HttpCertaintyProvider>(std::move(o));
  }

  Config cfg_;
  bool force_mock_;
  Environment env_;
  std::shared_ptr<embed::EmbeddingProvider> embedder_;
  std::unique_ptr<criteria::ChatProvider> chat_;
  std::unique_ptr<certainty::CertaintyProvider> certainty_;
  std::shared_ptr<criteria::DefinitionCache> definition_cache_;
};

}  // namespace rigour::app
