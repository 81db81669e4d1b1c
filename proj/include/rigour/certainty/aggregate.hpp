#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rigour/certainty/types.hpp"

namespace rigour::certainty {

/// Per criterion and cell: 100 * (mean over 4* sentences - mean over non-4*
/// sentences). Criteria follow `order`; names not in it come after, sorted.
/// Cells with a class missing keep counts and carry no diff.
inline CertaintyBreakdown aggregate_certainty(std::span<const SentenceLabel> labels,
                                              std::span<const CertaintyPrediction> predictions,
                                              const std::vector<std::string>& order = {}) {
  std::unordered_map<std::string, const CertaintyPrediction*> by_key;
  for (const auto& p : predictions) by_key.emplace(p.key(), &p);

  struct Acc {
    std::size_t n_four = 0, n_non = 0;
    std::array<double, kCells> sum_four{}, sum_non{};
  };
  std::map<std::string, Acc> acc;
  for (const auto& l : labels) {
    auto it = by_key.find(l.sentence.key());
    if (it == by_key.end()) throw MissingPrediction(l.sentence.key());
    auto& a = acc[l.criterion];
    const bool four = l.doc_label == RigourLabel::FourStar;
    (four ? a.n_four : a.n_non) += 1;
    auto& sums = four ? a.sum_four : a.sum_non;
    for (std::size_t c = 0; c < kCells; ++c) sums[c] += it->second->probs[c];
  }

  std::vector<std::string> names;
  std::set<std::string> placed;
  for (const auto& n : order) {
    if (acc.contains(n) && placed.insert(n).second) names.push_back(n);
  }
  for (const auto& [n, _] : acc) {
    if (placed.insert(n).second) names.push_back(n);
  }

  CertaintyBreakdown out;
  for (const auto& n : names) {
    const auto& a = acc.at(n);
    CriterionBreakdown b;
    b.criterion = n;
    b.n_four = a.n_four;
    b.n_non = a.n_non;
    for (std::size_t c = 0; c < kCells; ++c) {
      auto& cell = b.cells[c];
      cell.n_four = a.n_four;
      cell.n_non = a.n_non;
      if (a.n_four) cell.mean_four = a.sum_four[c] / static_cast<double>(a.n_four);
      if (a.n_non) cell.mean_non = a.sum_non[c] / static_cast<double>(a.n_non);
      if (a.n_four && a.n_non) cell.diff = 100.0 * (cell.mean_four - cell.mean_non);
    }
    out.criteria.push_back(std::move(b));
  }
  return out;
}

/// Names present in every list, in the order of the first.
inline std::vector<std::string> intersect_criteria(const std::vector<std::vector<std::string>>& lists) {
  if (lists.empty()) return {};
  std::vector<std::string> out;
  for (const auto& n : lists.front()) {
    bool everywhere = true;
    for (std::size_t k = 1; k < lists.size() && everywhere; ++k) {
      everywhere = std::find(lists[k].begin(), lists[k].end(), n) != lists[k].end();
    }
    if (everywhere && std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

inline std::vector<SentenceLabel> restrict_to(std::span<const SentenceLabel> labels,
                                              const std::vector<std::string>& criteria) {
  const std::set<std::string> keep(criteria.begin(), criteria.end());
  std::vector<SentenceLabel> out;
  for (const auto& l : labels) {
    if (keep.contains(l.criterion)) out.push_back(l);
  }
  return out;
}

}  // namespace rigour::certainty
