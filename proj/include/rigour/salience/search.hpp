#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "rigour/core/parallel.hpp"
#include "rigour/corpus/types.hpp"
#include "rigour/embed/pooling.hpp"
#include "rigour/salience/criteria_set.hpp"
#include "rigour/salience/kendall.hpp"
#include "rigour/salience/scoring.hpp"

namespace rigour::salience {

inline constexpr double kDefaultAlpha = 1e-4;
inline constexpr std::size_t kDefaultTopM = 20;

struct SetScore {
  std::uint32_t bitmask = 0;
  double tau = 0.0;
  double p_value = 1.0;
  bool defined = false;
};

struct SalienceResult {
  CriteriaSet set;
  std::vector<double> similarities;
  double tau;
  double p_value;
  ScoringMode mode;
};

struct SearchOptions {
  ScoringMode mode = ScoringMode::Appended;
  std::size_t top_m = kDefaultTopM;
  double alpha = kDefaultAlpha;
  /// Sets with p >= alpha are left out of the ranking.
  bool require_significance = true;
  /// Forward selection instead of full enumeration. Not the exhaustive
  /// search; meant for registries too large to enumerate.
  bool greedy = false;
  std::size_t workers = default_concurrency();
  std::size_t batch_size = 64;
};

struct SearchReport {
  std::vector<SalienceResult> ranked;
  /// Every evaluated set in bitmask order (or visit order for greedy).
  std::vector<SetScore> evaluated;
};

/// tau descending, then fewer criteria, then lower bitmask.
inline bool ranks_before(const SetScore& a, const SetScore& b) {
  if (a.tau != b.tau) return a.tau > b.tau;
  const int pa = std::popcount(a.bitmask), pb = std::popcount(b.bitmask);
  if (pa != pb) return pa < pb;
  return a.bitmask < b.bitmask;
}

namespace detail {

class SetEvaluator {
 public:
  SetEvaluator(std::span<const RigourLabel> labels, std::span<const embed::EmbeddingVector> docs,
               const CriteriaRegistry& registry, embed::EmbeddingProvider& embedder, ScoringMode mode)
      : labels_(labels), docs_(docs), registry_(registry), embedder_(embedder), mode_(mode), hash_(registry.hash()) {
    if (mode_ == ScoringMode::SummedIndividual) {
      for (const auto& q : embed_singletons(registry, embedder)) singles_.push_back(cosines(q, docs));
    }
  }

  std::vector<double> similarities(std::uint32_t mask) const {
    if (mode_ == ScoringMode::Appended) {
      const auto q = build_query(set(mask), registry_);
      return cosines(embed::embed_query(q.instruction, q.query, embedder_), docs_);
    }
    return summed(mask);
  }

  /// Scores masks[begin, end) into out[begin, end).
  void evaluate(std::span<const std::uint32_t> masks, std::span<SetScore> out) const {
    if (mode_ == ScoringMode::Appended) {
      std::vector<embed::QuerySpec> specs;
      specs.reserve(masks.size());
      for (auto m : masks) specs.push_back(build_query(set(m), registry_));
      const auto qs = embed::embed_queries(specs, embedder_);
      for (std::size_t k = 0; k < masks.size(); ++k) out[k] = score(masks[k], cosines(qs[k], docs_));
    } else {
      for (std::size_t k = 0; k < masks.size(); ++k) out[k] = score(masks[k], summed(masks[k]));
    }
  }

  CriteriaSet set(std::uint32_t mask) const { return CriteriaSet(mask, registry_.size(), hash_); }

 private:
  SetScore score(std::uint32_t mask, const std::vector<double>& sims) const {
    const auto k = kendall_tau(labels_, sims);
    return {mask, k.tau, k.p_value, k.defined};
  }

  std::vector<double> summed(std::uint32_t mask) const {
    std::vector<double> total(docs_.size(), 0.0);
    for (std::size_t i = 0; i < singles_.size(); ++i) {
      if (((mask >> i) & 1u) == 0) continue;
      for (std::size_t d = 0; d < total.size(); ++d) total[d] += singles_[i][d];
    }
    return total;
  }

  std::span<const RigourLabel> labels_;
  std::span<const embed::EmbeddingVector> docs_;
  const CriteriaRegistry& registry_;
  embed::EmbeddingProvider& embedder_;
  ScoringMode mode_;
  std::string hash_;
  std::vector<std::vector<double>> singles_;
};

inline std::vector<SetScore> evaluate_all(const SetEvaluator& ev, std::size_t width, const SearchOptions& opt) {
  const std::uint64_t count = (std::uint64_t{1} << width) - 1;
  std::vector<std::uint32_t> masks(count);
  for (std::uint64_t m = 1; m <= count; ++m) masks[m - 1] = static_cast<std::uint32_t>(m);
  std::vector<SetScore> out(count);
  const std::size_t batch = std::max<std::size_t>(1, opt.batch_size);
  const std::size_t batches = (masks.size() + batch - 1) / batch;
  parallel_for(batches, opt.workers, [&](std::size_t b) {
    const std::size_t lo = b * batch, hi = std::min(masks.size(), lo + batch);
    ev.evaluate(std::span(masks).subspan(lo, hi - lo), std::span(out).subspan(lo, hi - lo));
  });
  return out;
}

inline std::vector<SetScore> evaluate_greedy(const SetEvaluator& ev, std::size_t width) {
  std::vector<SetScore> visited;
  std::uint32_t current = 0;
  std::optional<SetScore> best;
  for (;;) {
    std::optional<SetScore> step;
    for (std::size_t i = 0; i < width; ++i) {
      if ((current >> i) & 1u) continue;
      const std::uint32_t m = current | (1u << i);
      SetScore s;
      ev.evaluate(std::span(&m, 1), std::span(&s, 1));
      visited.push_back(s);
      if (s.defined && (!step || ranks_before(s, *step))) step = s;
    }
    if (!step || (best && !(step->tau > best->tau))) break;
    best = step;
    current = step->bitmask;
    if (std::popcount(current) == static_cast<int>(width)) break;
  }
  return visited;
}

}  // namespace detail

/// Scores every non-empty criteria set against the labels and returns the
/// top_m significant ones, each with its per-document similarities.
inline SearchReport search_salient_sets(std::span<const RigourLabel> labels,
                                        std::span<const embed::EmbeddingVector> doc_embeddings,
                                        const CriteriaRegistry& registry, embed::EmbeddingProvider& embedder,
                                        const SearchOptions& options = {}) {
  if (labels.size() != doc_embeddings.size()) throw std::invalid_argument("labels and embeddings differ in length");
  if (registry.empty()) throw std::invalid_argument("registry is empty");
  if (registry.size() > kMaxRegistrySize) throw RegistryTooLarge(registry.size());
  const detail::SetEvaluator ev(labels, doc_embeddings, registry, embedder, options.mode);

  SearchReport report;
  report.evaluated = options.greedy ? detail::evaluate_greedy(ev, registry.size())
                                    : detail::evaluate_all(ev, registry.size(), options);
  std::vector<SetScore> eligible;
  for (const auto& s : report.evaluated) {
    if (!s.defined) continue;
    if (options.require_significance && !(s.p_value < options.alpha)) continue;
    eligible.push_back(s);
  }
  std::sort(eligible.begin(), eligible.end(), ranks_before);
  // Greedy can visit a mask twice from different paths.
  eligible.erase(std::unique(eligible.begin(), eligible.end(),
                             [](const SetScore& a, const SetScore& b) { return a.bitmask == b.bitmask; }),
                 eligible.end());
  if (eligible.size() > options.top_m) eligible.resize(options.top_m);
  for (const auto& s : eligible) {
    report.ranked.push_back({ev.set(s.bitmask), ev.similarities(s.bitmask), s.tau, s.p_value, options.mode});
  }
  return report;
}

/// Embeds document texts without an instruction (document mode).
inline std::vector<embed::EmbeddingVector> embed_corpus(const Corpus& corpus, embed::EmbeddingProvider& embedder) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& d : corpus.documents()) texts.push_back(d.text());
  return embed::embed_documents(texts, embedder);
}

inline SearchReport search_salient_sets(const Corpus& corpus, const CriteriaRegistry& registry,
                                        embed::EmbeddingProvider& embedder, const SearchOptions& options = {}) {
  if (corpus.empty()) throw EmptyCorpus();
  const auto labels = corpus.labels();
  const auto docs = embed_corpus(corpus, embedder);
  return search_salient_sets(labels, docs, registry, embedder, options);
}

struct ClassSummary {
  std::size_t n_four = 0, n_non = 0;
  double mean_four = 0, mean_non = 0;
  double sd_four = 0, sd_non = 0;
  double median_four = 0, median_non = 0;
  /// mean_four - mean_non
  double raw_gap = 0;
  /// raw_gap over the pooled standard deviation; comparable across scales.
  double gap = 0;
};

/// Per-class distribution of similarities and the standardized mean gap.
inline ClassSummary summarize_by_class(std::span<const RigourLabel> labels, std::span<const double> sims) {
  if (labels.size() != sims.size()) throw std::invalid_argument("labels and similarities differ in length");
  std::vector<double> four, non;
  for (std::size_t i = 0; i < sims.size(); ++i) (labels[i] == RigourLabel::FourStar ? four : non).push_back(sims[i]);
  if (four.empty() || non.empty()) throw SingleClassLabels();
  const auto stats = [](std::vector<double>& v, double& mean, double& sd, double& median) {
    double s = 0;
    for (double x : v) s += x;
    mean = s / static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    std::sort(v.begin(), v.end());
    const auto h = v.size() / 2;
    median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    return ss;
  };
  ClassSummary c;
  c.n_four = four.size();
  c.n_non = non.size();
  const double ss4 = stats(four, c.mean_four, c.sd_four, c.median_four);
  const double ssn = stats(non, c.mean_non, c.sd_non, c.median_non);
  c.raw_gap = c.mean_four - c.mean_non;
  const double dof = static_cast<double>(four.size() + non.size()) - 2.0;
  const double pooled = dof > 0 ? std::sqrt((ss4 + ssn) / dof) : 0.0;
  c.gap = pooled > 0 ? c.raw_gap / pooled : 0.0;
  return c;
}

}  // namespace rigour::salience
