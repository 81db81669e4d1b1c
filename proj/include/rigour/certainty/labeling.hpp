#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigour/core/parallel.hpp"
#include "rigour/corpus/sentences.hpp"
#include "rigour/corpus/types.hpp"
#include "rigour/certainty/types.hpp"
#include "rigour/embed/pooling.hpp"
#include "rigour/salience/scoring.hpp"

namespace rigour::certainty {

inline constexpr double kDefaultThreshold = 0.5;

/// Sentences of every document's abstract and introduction, in corpus order.
inline std::vector<Sentence> corpus_sentences(const Corpus& corpus) {
  std::vector<Sentence> out;
  for (const auto& d : corpus.documents()) {
    auto s = corpus::segment_sentences(d.text(), d.id);
    out.insert(out.end(), std::make_move_iterator(s.begin()), std::make_move_iterator(s.end()));
  }
  return out;
}

/// Assigns each sentence its most similar criterion (singleton query with
/// the retrieval instruction) and keeps it when that similarity reaches the
/// threshold. Equal similarities go to the earlier registry entry.
inline std::vector<SentenceLabel> label_sentences(std::span<const Sentence> sentences, const Corpus& corpus,
                                                  const criteria::CriteriaRegistry& registry,
                                                  embed::EmbeddingProvider& embedder,
                                                  double threshold = kDefaultThreshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw std::invalid_argument("threshold must be in (0, 1]");
  if (registry.empty()) throw std::invalid_argument("registry is empty");
  std::vector<RigourLabel> doc_labels;
  for (const auto& s : sentences) {
    const auto& d = corpus.at(s.doc_id);
    if (!d.label) throw MissingRequiredField("label (document " + d.id + ")");
    doc_labels.push_back(*d.label);
  }
  if (sentences.empty()) return {};

  const auto queries = salience::embed_singletons(registry, embedder);
  std::vector<std::string> texts;
  texts.reserve(sentences.size());
  for (const auto& s : sentences) texts.push_back(s.text);
  const auto vectors = embed::embed_documents(texts, embedder);

  struct Best {
    std::size_t criterion;
    double similarity;
  };
  std::vector<Best> best(sentences.size());
  parallel_for(sentences.size(), default_concurrency(), [&](std::size_t i) {
    Best b{0, embed::cosine_similarity(queries[0], vectors[i])};
    for (std::size_t c = 1; c < queries.size(); ++c) {
      const double s = embed::cosine_similarity(queries[c], vectors[i]);
      if (s > b.similarity) b = {c, s};
    }
    best[i] = b;
  });

  std::vector<SentenceLabel> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (best[i].similarity < threshold) continue;
    out.push_back({sentences[i], registry[best[i].criterion].name, best[i].similarity, doc_labels[i]});
  }
  return out;
}

}  // namespace rigour::certainty
