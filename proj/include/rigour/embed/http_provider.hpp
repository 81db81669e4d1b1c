#pragma once

#include <string>
#include <vector>

#include "rigour/core/http.hpp"
#include "rigour/core/parallel.hpp"
#include "rigour/embed/provider.hpp"

namespace rigour::embed {

struct HttpEmbeddingOptions {
  std::string base_url;  ///< e.g. "http://localhost:8000/v1"; "/embeddings" is appended
  std::string model;
  std::optional<std::string> api_key;
  /// Backend honours the "instruction" field with query-token pooling.
  bool supports_instruction = true;
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 4;
  std::size_t max_tokens = 4096;
  http::RetryPolicy retry;
};

/// Client for the embeddings wire contract:
///   POST {"model": str, "input": [str], "instruction": str|null}
///   ->   {"data": [{"embedding": [float]}]}
/// A batch only mixes requests that share mode and instruction.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(HttpEmbeddingOptions options)
      : opt_(std::move(options)), endpoint_(http::Endpoint::parse(opt_.base_url)) {
    if (opt_.batch_size == 0) opt_.batch_size = 1;
  }

  std::string id() const override { return "http/" + opt_.model; }
  bool supports_instruction() const override { return opt_.supports_instruction; }
  std::size_t max_tokens() const override { return opt_.max_tokens; }

 protected:
  std::vector<std::vector<double>> do_embed(std::span<const EmbeddingRequest> requests) override {
    struct Batch {
      std::vector<std::size_t> indices;
      std::optional<std::string> instruction;
    };
    std::vector<Batch> batches;
    for (std::size_t i = 0; i < requests.size(); ++i) {
      const auto& r = requests[i];
      if (batches.empty() || batches.back().instruction != r.instruction ||
          batches.back().indices.size() >= opt_.batch_size) {
        batches.push_back({{}, r.instruction});
      }
      batches.back().indices.push_back(i);
    }
    std::vector<std::vector<double>> out(requests.size());
    parallel_for(batches.size(), opt_.max_in_flight, [&](std::size_t b) {
      const auto& batch = batches[b];
      nlohmann::json body;
      body["model"] = opt_.model;
      body["input"] = nlohmann::json::array();
      for (auto i : batch.indices) body["input"].push_back(requests[i].text);
      body["instruction"] = batch.instruction ? nlohmann::json(*batch.instruction) : nlohmann::json(nullptr);
      const auto reply = http::post_json(endpoint_, "/embeddings", body, opt_.api_key, opt_.retry);
      try {
        const auto& data = reply.at("data");
        if (data.size() != batch.indices.size()) throw ProviderError("embedding count does not match input count");
        for (std::size_t k = 0; k < batch.indices.size(); ++k) {
          out[batch.indices[k]] = data.at(k).at("embedding").get<std::vector<double>>();
        }
      } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed embeddings reply: ") + e.what());
      }
    });
    return out;
  }

 private:
  HttpEmbeddingOptions opt_;
  http::Endpoint endpoint_;
};

}  // namespace rigour::embed
