#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/core/parallel.hpp"
#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::features {

inline constexpr std::size_t kDefaultMinDf = 5;

/// Sparse count entry: (column, count), columns ascending within a row.
struct Cell {
  std::uint32_t col;
  std::uint32_t count;
  bool operator==(const Cell&) const = default;
};

/// Document-term counts over a sorted, duplicate-free vocabulary.
/// Rows are stored sparsely; `dense_row` expands one.
struct FeatureMatrix {
  std::vector<std::string> vocabulary;
  std::vector<std::vector<Cell>> rows;
  bool binarized = false;

  std::size_t num_rows() const noexcept { return rows.size(); }
  std::size_t num_cols() const noexcept { return vocabulary.size(); }

  std::vector<std::uint32_t> dense_row(std::size_t r) const {
    std::vector<std::uint32_t> out(vocabulary.size(), 0);
    for (const auto& c : rows[r]) out[c.col] = c.count;
    return out;
  }

  std::uint32_t at(std::size_t r, std::size_t c) const {
    const auto& row = rows[r];
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const Cell& x, std::size_t col) { return x.col < col; });
    return it != row.end() && it->col == c ? it->count : 0;
  }

  FeatureMatrix binarize() const {
    FeatureMatrix m = *this;
    for (auto& row : m.rows) {
      for (auto& c : row) c.count = 1;
    }
    m.binarized = true;
    return m;
  }

  /// Keeps the given columns (ascending indices) and renumbers them.
  FeatureMatrix select_columns(const std::vector<std::size_t>& cols) const {
    FeatureMatrix m;
    m.binarized = binarized;
    std::vector<std::int64_t> remap(vocabulary.size(), -1);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      remap[cols[k]] = static_cast<std::int64_t>(k);
      m.vocabulary.push_back(vocabulary[cols[k]]);
    }
    for (const auto& row : rows) {
      std::vector<Cell> out;
      for (const auto& c : row) {
        if (remap[c.col] >= 0) out.push_back({static_cast<std::uint32_t>(remap[c.col]), c.count});
      }
      m.rows.push_back(std::move(out));
    }
    return m;
  }

  /// Same vocabulary, subset of rows.
  FeatureMatrix select_rows(const std::vector<std::size_t>& idx) const {
    FeatureMatrix m;
    m.vocabulary = vocabulary;
    m.binarized = binarized;
    for (auto i : idx) m.rows.push_back(rows[i]);
    return m;
  }
};

/// Lowercased alphabetic runs of length >= 2; "[MASK]" placeholders skipped.
inline std::vector<std::string> feature_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : text::word_spans(text)) {
    if (s.mask) continue;
    std::size_t i = s.begin;
    while (i < s.end) {
      if (!text::is_alpha(text[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < s.end && text::is_alpha(text[j])) ++j;
      if (j - i >= 2) out.push_back(text::lower(text.substr(i, j - i)));
      i = j;
    }
  }
  return out;
}

inline FeatureMatrix build_feature_matrix(const std::vector<std::string>& texts, bool binarize,
                                          std::size_t min_df = kDefaultMinDf) {
  std::vector<std::map<std::string, std::uint32_t>> counts(texts.size());
  std::map<std::string, std::size_t> df;
  parallel_for(texts.size(), default_concurrency(), [&](std::size_t i) {
    for (auto& t : feature_tokens(texts[i])) ++counts[i][std::move(t)];
  });
  for (const auto& c : counts) {
    for (const auto& [t, _] : c) ++df[t];
  }
  FeatureMatrix m;
  std::unordered_map<std::string, std::uint32_t> col;
  for (const auto& [t, n] : df) {
    if (n < min_df) continue;
    col.emplace(t, static_cast<std::uint32_t>(m.vocabulary.size()));
    m.vocabulary.push_back(t);
  }
  if (m.vocabulary.empty()) throw EmptyVocabulary();
  m.rows.resize(texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [t, n] : counts[i]) {
      auto it = col.find(t);
      if (it != col.end()) m.rows[i].push_back({it->second, binarize ? 1u : n});
    }
  }
  m.binarized = binarize;
  return m;
}

inline FeatureMatrix build_feature_matrix(const Corpus& corpus, bool binarize, std::size_t min_df = kDefaultMinDf) {
  if (corpus.empty()) throw EmptyCorpus();
  std::vector<std::string> texts;
  for (const auto& d : corpus.documents()) texts.push_back(d.text());
  return build_feature_matrix(texts, binarize, min_df);
}

}  // namespace rigour::features
