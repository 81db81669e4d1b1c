#pragma once

#include <span>
#include <string>
#include <vector>

#include "rigour/embed/pooling.hpp"
#include "rigour/embed/vector.hpp"
#include "rigour/salience/criteria_set.hpp"

namespace rigour::salience {

enum class ScoringMode { Appended, SummedIndividual };

inline std::string_view to_string(ScoringMode m) { return m == ScoringMode::Appended ? "appended" : "summed"; }

inline ScoringMode parse_mode(std::string_view s) {
  if (s == "appended") return ScoringMode::Appended;
  if (s == "summed" || s == "summed-individual" || s == "individual") return ScoringMode::SummedIndividual;
  throw std::invalid_argument("unknown scoring mode: " + std::string(s));
}

inline std::vector<double> cosines(const embed::EmbeddingVector& query, std::span<const embed::EmbeddingVector> docs) {
  std::vector<double> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(embed::cosine_similarity(query, d));
  return out;
}

/// Embeds each criterion alone as an instruction-conditioned query.
inline std::vector<embed::EmbeddingVector> embed_singletons(const CriteriaRegistry& registry,
                                                            embed::EmbeddingProvider& embedder) {
  std::vector<embed::QuerySpec> specs;
  const auto hash = registry.hash();
  for (std::size_t i = 0; i < registry.size(); ++i) {
    specs.push_back(build_query(CriteriaSet(1u << i, registry.size(), hash), registry));
  }
  return embed::embed_queries(specs, embedder);
}

/// Per-document similarity to a criteria set. Appended embeds the composite
/// query once; SummedIndividual adds the singleton similarities.
inline std::vector<double> score_documents(const CriteriaSet& set, std::span<const embed::EmbeddingVector> doc_embeddings,
                                           const CriteriaRegistry& registry, embed::EmbeddingProvider& embedder,
                                           ScoringMode mode) {
  set.check(registry);
  if (mode == ScoringMode::Appended) {
    const auto q = build_query(set, registry);
    return cosines(embed::embed_query(q.instruction, q.query, embedder), doc_embeddings);
  }
  std::vector<double> total(doc_embeddings.size(), 0.0);
  for (auto i : set.indices()) {
    const auto q = build_query(CriteriaSet(1u << i, set.width(), set.registry_hash()), registry);
    const auto sims = cosines(embed::embed_query(q.instruction, q.query, embedder), doc_embeddings);
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += sims[k];
  }
  return total;
}

}  // namespace rigour::salience
