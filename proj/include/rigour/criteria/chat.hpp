#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

#include "rigour/core/http.hpp"

namespace rigour::criteria {

/// Single-turn chat completion.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Model identifier; part of the definition cache key.
  virtual std::string model_id() const = 0;
  virtual std::string complete(const std::string& prompt) = 0;
};

/// Deterministic stand-in. Replies come from `respond(prompt)`; every call is
/// counted and recorded.
class MockChatProvider final : public ChatProvider {
 public:
  using Responder = std::function<std::string(const std::string&)>;

  explicit MockChatProvider(Responder respond, std::string model = "mock-chat")
      : respond_(std::move(respond)), model_(std::move(model)) {}

  std::string model_id() const override { return model_; }

  std::string complete(const std::string& prompt) override {
    {
      std::lock_guard lock(mutex_);
      prompts_.push_back(prompt);
    }
    ++calls_;
    return respond_(prompt);
  }

  std::size_t call_count() const noexcept { return calls_.load(); }
  std::vector<std::string> prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
  }

 private:
  Responder respond_;
  std::string model_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mutex_;
  std::vector<std::string> prompts_;
};

struct HttpChatOptions {
  std::string base_url;  ///< "/chat/completions" is appended
  std::string model;
  std::optional<std::string> api_key;
  http::RetryPolicy retry;
};

/// POST {"model", "messages": [{"role": "user", "content"}], "temperature": 0}
/// -> {"choices": [{"message": {"content"}}]}
class HttpChatProvider final : public ChatProvider {
 public:
  explicit HttpChatProvider(HttpChatOptions options)
      : opt_(std::move(options)), endpoint_(http::Endpoint::parse(opt_.base_url)) {}

  std::string model_id() const override { return opt_.model; }

  std::string complete(const std::string& prompt) override {
    nlohmann::json body;
    body["model"] = opt_.model;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = 0;
    const auto reply = http::post_json(endpoint_, "/chat/completions", body, opt_.api_key, opt_.retry);
    try {
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected chat reply shape: ") + e.what());
    }
  }

 private:
  HttpChatOptions opt_;
  http::Endpoint endpoint_;
};

}  // namespace rigour::criteria
