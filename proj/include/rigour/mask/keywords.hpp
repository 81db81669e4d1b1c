#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"
#include "rigour/embed/pooling.hpp"
#include "rigour/mask/masking.hpp"
#include "rigour/mask/stopwords.hpp"

namespace rigour::mask {

inline constexpr std::size_t kDefaultKeywordsPerDocument = 10;

struct TopicKeyword {
  std::string surface;  ///< lowercased 1- or 2-word n-gram
  double score = 0.0;   ///< cosine to the document embedding

  bool operator==(const TopicKeyword&) const = default;
};

namespace detail {

inline bool candidate_word(std::string_view w) {
  if (w.size() < 2 || is_stopword(w)) return false;
  return std::any_of(w.begin(), w.end(), [](char c) { return text::is_alpha(c); });
}

}  // namespace detail

/// Distinct unigrams and adjacent bigrams (whitespace-separated) whose words
/// all survive stopword filtering; sorted lexicographically.
inline std::vector<std::string> keyword_candidates(std::string_view text) {
  const auto spans = text::word_spans(text);
  std::set<std::string> out;
  std::string prev;
  std::size_t prev_end = 0;
  bool prev_ok = false;
  for (const auto& s : spans) {
    if (s.mask) {
      prev_ok = false;
      continue;
    }
    std::string w = text::lower(text.substr(s.begin, s.end - s.begin));
    const bool ok = detail::candidate_word(w);
    if (ok) {
      out.insert(w);
      bool adjacent = prev_ok;
      for (std::size_t c = prev_end; c < s.begin && adjacent; ++c) adjacent = text::is_space(text[c]);
      if (adjacent) out.insert(prev + " " + w);
    }
    prev = std::move(w);
    prev_ok = ok;
    prev_end = s.end;
  }
  return {out.begin(), out.end()};
}

namespace detail {

inline std::vector<TopicKeyword> rank_candidates(const std::vector<std::string>& candidates,
                                                 const embed::EmbeddingVector& reference,
                                                 embed::EmbeddingProvider& embedder, std::size_t k) {
  const auto vectors = embed::embed_documents(candidates, embedder);
  std::vector<TopicKeyword> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    scored.push_back({candidates[i], embed::cosine_similarity(vectors[i], reference)});
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.surface < b.surface;
  });
  scored.resize(std::min(k, scored.size()));
  return scored;
}

}  // namespace detail

/// Top-k candidates by cosine to the whole-document embedding. Document and
/// candidates are embedded in document mode (no instruction). Ties go to the
/// lexicographically smaller surface.
inline std::vector<TopicKeyword> extract_topic_keywords(const Document& doc, embed::EmbeddingProvider& embedder,
                                                        std::size_t k = kDefaultKeywordsPerDocument) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (doc.state != DocumentState::Stripped) {
    throw InvalidState("keyword extraction expects a stripped document: " + doc.id);
  }
  const std::string text = doc.text();
  const auto candidates = keyword_candidates(text);
  if (candidates.empty()) throw NoCandidates(doc.id);
  const auto reference = embed::embed_document(text, embedder);
  return detail::rank_candidates(candidates, reference, embedder, k);
}

/// Corpus-level variant: one keyword list ranked against the centroid of
/// all document embeddings.
inline std::vector<TopicKeyword> extract_corpus_keywords(const Corpus& corpus, embed::EmbeddingProvider& embedder,
                                                         std::size_t k) {
  if (corpus.empty()) throw EmptyCorpus();
  std::set<std::string> all;
  std::vector<std::string> texts;
  for (const auto& d : corpus.documents()) {
    texts.push_back(d.text());
    for (auto& c : keyword_candidates(texts.back())) all.insert(std::move(c));
  }
  if (all.empty()) throw NoCandidates("corpus");
  const auto docs = embed::embed_documents(texts, embedder);
  std::vector<double> centroid(docs.front().dim(), 0.0);
  for (const auto& v : docs) {
    for (std::size_t i = 0; i < centroid.size(); ++i) centroid[i] += v[i] / static_cast<double>(docs.size());
  }
  return detail::rank_candidates({all.begin(), all.end()}, embed::EmbeddingVector(std::move(centroid)), embedder, k);
}

inline std::vector<std::string> surfaces(const std::vector<TopicKeyword>& kws) {
  std::vector<std::string> out;
  for (const auto& k : kws) out.push_back(k.surface);
  return out;
}

/// Replaces keyword occurrences with "[MASK]" in abstract and introduction.
/// Accepts stripped or already-masked documents; repeated application is a no-op.
inline Document mask_document(Document doc, const std::vector<TopicKeyword>& keywords, MaskStats* stats = nullptr) {
  if (doc.state == DocumentState::Raw) throw InvalidState("masking expects a stripped document: " + doc.id);
  MaskStats a, b;
  doc.abstract = mask_text(doc.abstract, surfaces(keywords), &a);
  doc.introduction = mask_text(doc.introduction, surfaces(keywords), &b);
  if (stats) {
    for (std::size_t i = 0; i < a.occurrences.size(); ++i) {
      stats->occurrences.emplace_back(a.occurrences[i].first, a.occurrences[i].second + b.occurrences[i].second);
    }
  }
  doc.advance(DocumentState::Masked);
  return doc;
}

}  // namespace rigour::mask
