#pragma once

#include <chrono>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "rigour/core/error.hpp"

namespace rigour::http {

struct Endpoint {
  std::string scheme_host;  ///< "http://host:port"
  std::string path_prefix;  ///< "/v1" or ""

  /// Splits "https://api.example.com/v1" into origin and path prefix.
  static Endpoint parse(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("base URL needs a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    Endpoint e;
    e.scheme_host = base_url.substr(0, path_start);
    if (path_start != std::string::npos) e.path_prefix = base_url.substr(path_start);
    while (!e.path_prefix.empty() && e.path_prefix.back() == '/') e.path_prefix.pop_back();
    return e;
  }
};

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds initial_backoff{200};
  double multiplier = 2.0;
  std::chrono::seconds timeout{120};
};

inline bool is_transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

/// POSTs a JSON body and returns the parsed JSON reply. Connection failures
/// and 408/429/5xx replies are retried with exponential backoff; other
/// non-2xx replies fail immediately.
inline nlohmann::json post_json(const Endpoint& endpoint, const std::string& path, const nlohmann::json& body,
                                const std::optional<std::string>& bearer, const RetryPolicy& retry) {
  httplib::Client client(endpoint.scheme_host);
  client.set_connection_timeout(retry.timeout);
  client.set_read_timeout(retry.timeout);
  client.set_write_timeout(retry.timeout);
  httplib::Headers headers;
  if (bearer && !bearer->empty()) headers.emplace("Authorization", "Bearer " + *bearer);
  const std::string payload = body.dump();
  auto delay = retry.initial_backoff;
  std::string last_error;
  for (int attempt = 0; attempt <= retry.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(static_cast<long long>(static_cast<double>(delay.count()) * retry.multiplier));
    }
    auto res = client.Post(endpoint.path_prefix + path, headers, payload, "application/json");
    if (!res) {
      last_error = "request to " + endpoint.scheme_host + endpoint.path_prefix + path + " failed: " +
                   httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw ProviderError(std::string("reply is not JSON: ") + e.what());
      }
    }
    last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (!is_transient_status(res->status)) throw ProviderError(last_error);
  }
  throw ProviderError(last_error + " (retries exhausted)", true);
}

inline std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return std::string(v);
}

}  // namespace rigour::http
