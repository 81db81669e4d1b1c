#pragma once

#include <atomic>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/core/text.hpp"
#include "rigour/embed/vector.hpp"

namespace rigour::embed {

/// One text to embed. Document requests never carry an instruction.
struct EmbeddingRequest {
  std::string text;
  std::optional<std::string> instruction;
  EmbeddingMode mode = EmbeddingMode::Document;

  static EmbeddingRequest document(std::string text) { return {std::move(text), std::nullopt, EmbeddingMode::Document}; }
  static EmbeddingRequest query(std::string text, std::optional<std::string> instruction) {
    return {std::move(text), std::move(instruction), EmbeddingMode::Query};
  }

  void validate() const {
    if (mode == EmbeddingMode::Document && instruction) {
      throw std::invalid_argument("document embeddings are computed without an instruction");
    }
  }

  bool operator==(const EmbeddingRequest&) const = default;
};

/// Backend that turns requests into raw vectors. `embed` checks the request
/// contract and that every vector of the session has the same dimension;
/// implementations override `do_embed`. Implementations must be thread-safe.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string id() const = 0;

  /// False for backends that cannot pool over query tokens conditioned on a
  /// prepended instruction; callers then use the concatenation fallback.
  virtual bool supports_instruction() const { return true; }

  /// Context limit in provider tokens; longer documents are chunked.
  virtual std::size_t max_tokens() const { return std::numeric_limits<std::size_t>::max(); }

  virtual std::size_t count_tokens(std::string_view text) const { return text::words(text).size(); }

  std::vector<std::vector<double>> embed(std::span<const EmbeddingRequest> requests) {
    for (const auto& r : requests) r.validate();
    auto out = do_embed(requests);
    if (out.size() != requests.size()) {
      throw ProviderError("expected " + std::to_string(requests.size()) + " vectors, got " +
                          std::to_string(out.size()));
    }
    for (const auto& v : out) check_dimension(v.size());
    return out;
  }

  std::optional<std::size_t> dimension() const {
    const auto d = dim_.load();
    return d == 0 ? std::nullopt : std::optional<std::size_t>(d);
  }

 protected:
  virtual std::vector<std::vector<double>> do_embed(std::span<const EmbeddingRequest> requests) = 0;

 private:
  void check_dimension(std::size_t d) {
    std::size_t expected = 0;
    if (dim_.compare_exchange_strong(expected, d)) return;
    if (expected != d) throw DimensionMismatch(expected, d);
  }

  std::atomic<std::size_t> dim_{0};
};

}  // namespace rigour::embed
