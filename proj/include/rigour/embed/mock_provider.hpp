#pragma once

#include <cmath>
#include <limits>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>
#include <string>
#include <vector>

#include "rigour/core/digest.hpp"
#include "rigour/core/random.hpp"
#include "rigour/core/text.hpp"
#include "rigour/embed/provider.hpp"

namespace rigour::embed {

enum class TokenScheme {
  OneHot,    ///< token -> unit vector at hash(token) mod (dim - 1)
  Gaussian,  ///< token -> seeded N(0, 1/dim) vector over the first dim - 1 axes
};

struct MockEmbeddingOptions {
  std::size_t dim = 256;
  TokenScheme scheme = TokenScheme::Gaussian;
  std::uint64_t seed = 0;
  /// Size of the constant offset v added to every query token when an
  /// instruction is present. v lives on the last axis, which tokens never use.
  double instruction_offset = 0.05;
  std::size_t max_tokens = std::numeric_limits<std::size_t>::max();
  bool supports_instruction = true;
  bool record_calls = true;
  std::string id = "mock";
};

/// Deterministic stand-in with additive token pooling:
///   document:        (1/|d|) sum_t E(t)
///   query + instr.:  (1/|q|) sum_t (E(t) + v)  =  mean_t E(t) + v
/// Every request is recorded so tests can inspect what was sent.
class MockEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit MockEmbeddingProvider(MockEmbeddingOptions options = {}) : opt_(std::move(options)) {
    if (opt_.dim < 2) throw std::invalid_argument("mock dimension must be at least 2");
  }

  std::string id() const override {
    return opt_.id + "/" + (opt_.scheme == TokenScheme::OneHot ? "onehot" : "gaussian") + "-" +
           std::to_string(opt_.dim) + "-s" + std::to_string(opt_.seed);
  }
  bool supports_instruction() const override { return opt_.supports_instruction; }
  std::size_t max_tokens() const override { return opt_.max_tokens; }
  std::size_t count_tokens(std::string_view text) const override { return tokenize(text).size(); }

  static std::vector<std::string> tokenize(std::string_view text) { return text::words(text); }

  std::vector<double> token_vector(std::string_view token) const {
    std::vector<double> v(opt_.dim, 0.0);
    const std::uint64_t h = digest::fnv1a(token) ^ (opt_.seed * 0x9e3779b97f4a7c15ULL);
    if (opt_.scheme == TokenScheme::OneHot) {
      v[h % (opt_.dim - 1)] = 1.0;
    } else {
      Rng rng(h);
      const double scale = 1.0 / std::sqrt(static_cast<double>(opt_.dim - 1));
      for (std::size_t k = 0; k + 1 < opt_.dim; ++k) v[k] = rng.normal() * scale;
    }
    return v;
  }

  std::vector<double> offset_vector() const {
    std::vector<double> v(opt_.dim, 0.0);
    v.back() = opt_.instruction_offset;
    return v;
  }

  std::vector<EmbeddingRequest> calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }

  std::size_t call_count() const {
    std::lock_guard lock(mutex_);
    return calls_.size();
  }

  void clear_calls() {
    std::lock_guard lock(mutex_);
    calls_.clear();
  }

  const MockEmbeddingOptions& options() const noexcept { return opt_; }

 protected:
  std::vector<std::vector<double>> do_embed(std::span<const EmbeddingRequest> requests) override {
    if (opt_.record_calls) {
      std::lock_guard lock(mutex_);
      calls_.insert(calls_.end(), requests.begin(), requests.end());
    }
    std::vector<std::vector<double>> out;
    out.reserve(requests.size());
    for (const auto& r : requests) out.push_back(pool(r));
    return out;
  }

 private:
  std::vector<double> pool(const EmbeddingRequest& r) const {
    std::vector<double> acc(opt_.dim, 0.0);
    const auto tokens = tokenize(r.text);
    for (const auto& t : tokens) {
      const auto& v = memo_vector(t);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
    }
    if (!tokens.empty()) {
      for (auto& x : acc) x /= static_cast<double>(tokens.size());
    }
    if (r.mode == EmbeddingMode::Query && r.instruction && !r.instruction->empty() && opt_.supports_instruction) {
      acc.back() += opt_.instruction_offset;
    }
    return acc;
  }

  const std::vector<double>& memo_vector(const std::string& token) const {
    {
      std::shared_lock lock(memo_mutex_);
      auto it = memo_.find(token);
      if (it != memo_.end()) return it->second;
    }
    auto v = token_vector(token);
    std::unique_lock lock(memo_mutex_);
    return memo_.try_emplace(token, std::move(v)).first->second;
  }

  MockEmbeddingOptions opt_;
  mutable std::shared_mutex memo_mutex_;
  mutable std::unordered_map<std::string, std::vector<double>> memo_;
  mutable std::mutex mutex_;
  std::vector<EmbeddingRequest> calls_;
};

}  // namespace rigour::embed
