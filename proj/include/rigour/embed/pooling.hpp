#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigour/corpus/sentences.hpp"
#include "rigour/embed/provider.hpp"

namespace rigour::embed {

struct QuerySpec {
  std::string instruction;
  std::string query;
};

/// E(q|i): mean over the query tokens, each contextualized by the prepended
/// instruction. Backends without that control embed "instruction\nquery" and
/// the vector's provenance records the fallback.
inline std::vector<EmbeddingVector> embed_queries(std::span<const QuerySpec> queries, EmbeddingProvider& provider) {
  const bool native = provider.supports_instruction();
  std::vector<EmbeddingRequest> requests;
  requests.reserve(queries.size());
  for (const auto& q : queries) {
    if (provider.count_tokens(q.query) == 0) throw std::invalid_argument("query is empty");
    if (native) {
      requests.push_back(EmbeddingRequest::query(q.query, q.instruction));
    } else {
      requests.push_back(EmbeddingRequest::query(q.instruction + "\n" + q.query, std::nullopt));
    }
  }
  auto raw = provider.embed(requests);
  std::vector<EmbeddingVector> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    Provenance p{provider.id(), queries[i].instruction,
                 native ? Pooling::QueryTokenMean : Pooling::ConcatenationFallback};
    out.emplace_back(std::move(raw[i]), std::move(p));
  }
  return out;
}

inline EmbeddingVector embed_query(const std::string& instruction, const std::string& query,
                                   EmbeddingProvider& provider) {
  const QuerySpec q{instruction, query};
  return std::move(embed_queries(std::span(&q, 1), provider).front());
}

namespace detail {

/// Sentence-boundary chunks of at most `limit` provider tokens. A sentence
/// longer than the limit is cut at word boundaries.
inline std::vector<std::string> chunk_text(std::string_view text, std::size_t limit, const EmbeddingProvider& provider) {
  std::vector<std::string> pieces;
  for (auto& s : corpus::segment_sentences(text)) {
    if (provider.count_tokens(s.text) <= limit) {
      pieces.push_back(std::move(s.text));
      continue;
    }
    std::string cur;
    std::size_t pos = 0;
    const std::string t = text::normalize_whitespace(s.text);
    while (pos < t.size()) {
      auto next_space = t.find(' ', pos);
      const std::string word = t.substr(pos, next_space == std::string::npos ? std::string::npos : next_space - pos);
      pos = next_space == std::string::npos ? t.size() : next_space + 1;
      std::string candidate = cur.empty() ? word : cur + " " + word;
      if (!cur.empty() && provider.count_tokens(candidate) > limit) {
        pieces.push_back(std::move(cur));
        cur = word;
      } else {
        cur = std::move(candidate);
      }
    }
    if (!cur.empty()) pieces.push_back(std::move(cur));
  }
  std::vector<std::string> chunks;
  std::string cur;
  for (auto& p : pieces) {
    std::string candidate = cur.empty() ? p : cur + " " + p;
    if (!cur.empty() && provider.count_tokens(candidate) > limit) {
      chunks.push_back(std::move(cur));
      cur = std::move(p);
    } else {
      cur = std::move(candidate);
    }
  }
  if (!cur.empty()) chunks.push_back(std::move(cur));
  return chunks;
}

}  // namespace detail

/// E(d): mean over all document tokens with no instruction. Documents over
/// the provider's context limit are embedded chunk by chunk and the chunk
/// means are combined weighted by their token counts.
inline std::vector<EmbeddingVector> embed_documents(std::span<const std::string> texts, EmbeddingProvider& provider) {
  const std::size_t limit = provider.max_tokens();
  struct Plan {
    std::size_t first;
    std::vector<double> weights;
  };
  std::vector<Plan> plans;
  std::vector<EmbeddingRequest> requests;
  for (const auto& t : texts) {
    const std::size_t n = provider.count_tokens(t);
    if (n == 0) throw std::invalid_argument("document is empty after tokenization");
    Plan plan{requests.size(), {}};
    if (n <= limit) {
      requests.push_back(EmbeddingRequest::document(t));
      plan.weights.push_back(static_cast<double>(n));
    } else {
      for (auto& c : detail::chunk_text(t, limit, provider)) {
        const std::size_t cn = provider.count_tokens(c);
        if (cn == 0) continue;
        plan.weights.push_back(static_cast<double>(cn));
        requests.push_back(EmbeddingRequest::document(std::move(c)));
      }
    }
    plans.push_back(std::move(plan));
  }
  auto raw = provider.embed(requests);

  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& plan : plans) {
    if (plan.weights.size() == 1) {
      out.emplace_back(std::move(raw[plan.first]), Provenance{provider.id(), std::nullopt, Pooling::DocumentMean});
      continue;
    }
    const std::size_t dim = raw[plan.first].size();
    std::vector<double> acc(dim, 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < plan.weights.size(); ++c) {
      const auto& v = raw[plan.first + c];
      for (std::size_t k = 0; k < dim; ++k) acc[k] += plan.weights[c] * v[k];
      total += plan.weights[c];
    }
    for (auto& x : acc) x /= total;
    out.emplace_back(std::move(acc), Provenance{provider.id(), std::nullopt, Pooling::ChunkedDocumentMean});
  }
  return out;
}

inline EmbeddingVector embed_document(const std::string& text, EmbeddingProvider& provider) {
  return std::move(embed_documents(std::span(&text, 1), provider).front());
}

}  // namespace rigour::embed
