#pragma once

#include <algorithm>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigour/corpus/types.hpp"
#include "rigour/features/logistic.hpp"
#include "rigour/features/matrix.hpp"
#include "rigour/features/mutual_information.hpp"

namespace rigour::features {

inline constexpr double kDefaultPercentile = 10.0;
inline constexpr std::size_t kDefaultTopK = 100;

struct KeywordFeature {
  std::string token;
  double mi_score = 0.0;
  double coefficient = 0.0;
  RigourLabel label_class = RigourLabel::NonFourStar;
  bool operator==(const KeywordFeature&) const = default;
};

struct RankedKeywords {
  std::vector<KeywordFeature> positive;
  std::vector<KeywordFeature> negative;
};

/// Within the MI-selected percentile, the top_k most positive and most
/// negative coefficients. Zero coefficients land on neither side.
inline RankedKeywords rank_rigour_keywords(const ClassifierModel& model, std::span<const double> mi_scores,
                                           double percentile = kDefaultPercentile,
                                           std::size_t top_k = kDefaultTopK) {
  if (mi_scores.size() != model.weights.size()) throw std::invalid_argument("MI scores not aligned to the model");
  RankedKeywords out;
  for (auto j : select_percentile(mi_scores, percentile)) {
    const double c = model.weights[j];
    if (c == 0.0) continue;
    KeywordFeature k{model.vocabulary[j], mi_scores[j], c, c > 0 ? RigourLabel::FourStar : RigourLabel::NonFourStar};
    (c > 0 ? out.positive : out.negative).push_back(std::move(k));
  }
  std::stable_sort(out.positive.begin(), out.positive.end(),
                   [](const auto& a, const auto& b) { return a.coefficient > b.coefficient; });
  std::stable_sort(out.negative.begin(), out.negative.end(),
                   [](const auto& a, const auto& b) { return a.coefficient < b.coefficient; });
  if (out.positive.size() > top_k) out.positive.resize(top_k);
  if (out.negative.size() > top_k) out.negative.resize(top_k);
  return out;
}

/// Drops tokens absent from a manual allowlist; order is kept.
inline RankedKeywords filter_allowlist(RankedKeywords ranked, const std::set<std::string>& allow) {
  const auto keep = [&](std::vector<KeywordFeature>& v) {
    std::erase_if(v, [&](const KeywordFeature& k) { return !allow.contains(k.token); });
  };
  keep(ranked.positive);
  keep(ranked.negative);
  return ranked;
}

struct KeywordAnalysisOptions {
  std::size_t min_df = kDefaultMinDf;
  double percentile = kDefaultPercentile;
  std::size_t top_k = kDefaultTopK;
  LogisticConfig logistic;
  // Fit on every column instead of the MI-selected ones.
  bool full_vocabulary = false;
};

struct KeywordAnalysis {
  FeatureMatrix matrix;
  std::vector<double> mi_scores;
  std::vector<std::size_t> selected;
  ClassifierModel model;
  RankedKeywords keywords;
};

/// Binarize, score MI, fit the classifier, rank. Every document needs a label.
inline KeywordAnalysis analyze_keywords(const std::vector<std::string>& texts, std::span<const RigourLabel> labels,
                                        const KeywordAnalysisOptions& options = {}) {
  KeywordAnalysis a;
  a.matrix = build_feature_matrix(texts, true, options.min_df);
  a.mi_scores = mutual_information(a.matrix, labels);
  a.selected = select_percentile(a.mi_scores, options.percentile);
  if (options.full_vocabulary) {
    a.model = fit_logistic_regression(a.matrix, labels, options.logistic);
  } else {
    a.model = fit_on_columns(a.matrix, labels, a.selected, options.logistic);
  }
  a.keywords = rank_rigour_keywords(a.model, a.mi_scores, options.percentile, options.top_k);
  return a;
}

inline KeywordAnalysis analyze_keywords(const Corpus& corpus, const KeywordAnalysisOptions& options = {}) {
  if (corpus.empty()) throw EmptyCorpus();
  if (!corpus.fully_labeled()) throw MissingRequiredField("label");
  std::vector<std::string> texts;
  for (const auto& d : corpus.documents()) texts.push_back(d.text());
  const auto labels = corpus.labels();
  return analyze_keywords(texts, labels, options);
}

}  // namespace rigour::features
