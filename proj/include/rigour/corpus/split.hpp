#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/core/random.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::corpus {

using SplitRatios = std::array<double, 3>;

inline constexpr std::array<std::string_view, 3> kSplitNames = {kTrainSplit, kValSplit, kTestSplit};

/// Largest-remainder apportionment of `total` by `ratios`. Equal remainders
/// go to the earlier slot.
inline std::vector<std::size_t> largest_remainder(std::size_t total, std::span<const double> ratios) {
  std::vector<std::size_t> counts(ratios.size());
  std::vector<double> frac(ratios.size());
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < ratios.size(); ++s) {
    const double quota = static_cast<double>(total) * ratios[s];
    counts[s] = static_cast<std::size_t>(std::floor(quota));
    frac[s] = quota - std::floor(quota);
    assigned += counts[s];
  }
  std::vector<std::size_t> order(ratios.size());
  for (std::size_t s = 0; s < order.size(); ++s) order[s] = s;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++counts[order[k % order.size()]];
  return counts;
}

namespace detail {

/// Integer cell counts with row sums = stratum sizes and column sums = split
/// totals, each cell floor(quota) or floor(quota)+1, maximizing the summed
/// fractional parts of the cells rounded up. Exhaustive over 0/1 round-ups,
/// which is small because there are at most three strata.
inline std::vector<std::vector<std::size_t>> controlled_rounding(const std::vector<std::size_t>& rows,
                                                                 const std::vector<std::size_t>& cols,
                                                                 const SplitRatios& ratios) {
  const std::size_t g = rows.size();
  const std::size_t s = cols.size();
  std::vector<std::vector<std::size_t>> base(g, std::vector<std::size_t>(s));
  std::vector<std::vector<double>> frac(g, std::vector<double>(s));
  for (std::size_t r = 0; r < g; ++r) {
    for (std::size_t c = 0; c < s; ++c) {
      const double q = static_cast<double>(rows[r]) * ratios[c];
      base[r][c] = static_cast<std::size_t>(std::floor(q));
      frac[r][c] = q - std::floor(q);
    }
  }
  const std::size_t cells = g * s;
  if (cells > 20) throw std::invalid_argument("too many strata for controlled rounding");

  double best_score = -1.0;
  std::uint32_t best = 0;
  bool found = false;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    bool ok = true;
    double score = 0.0;
    for (std::size_t r = 0; r < g && ok; ++r) {
      std::size_t sum = 0;
      for (std::size_t c = 0; c < s; ++c) sum += base[r][c] + ((mask >> (r * s + c)) & 1u);
      ok = sum == rows[r];
    }
    for (std::size_t c = 0; c < s && ok; ++c) {
      std::size_t sum = 0;
      for (std::size_t r = 0; r < g; ++r) sum += base[r][c] + ((mask >> (r * s + c)) & 1u);
      ok = sum == cols[c];
    }
    if (!ok) continue;
    for (std::size_t k = 0; k < cells; ++k) {
      if ((mask >> k) & 1u) score += frac[k / s][k % s];
    }
    if (!found || score > best_score + 1e-12) {
      best_score = score;
      best = mask;
      found = true;
    }
  }
  if (!found) {
    // Fall back to independent per-stratum apportionment.
    std::vector<std::vector<std::size_t>> out;
    for (auto n : rows) out.push_back(largest_remainder(n, ratios));
    return out;
  }
  for (std::size_t k = 0; k < cells; ++k) {
    if ((best >> k) & 1u) ++base[k / s][k % s];
  }
  return base;
}

}  // namespace detail

/// Deterministic train/val/test split. Split sizes follow largest-remainder
/// rounding of the whole corpus; when labels exist the split is stratified so
/// that each split's label counts stay within one document of proportional.
inline Corpus split_corpus(const Corpus& corpus, const SplitRatios& ratios, std::uint64_t seed) {
  if (corpus.empty()) throw EmptyCorpus();
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");

  // Strata in fixed order: FourStar, NonFourStar, unlabeled.
  std::vector<std::vector<std::string>> strata(3);
  for (const auto& d : corpus.documents()) {
    const std::size_t g = !d.label ? 2 : (*d.label == RigourLabel::FourStar ? 0 : 1);
    strata[g].push_back(d.id);
  }
  std::vector<std::vector<std::string>> used;
  for (auto& s : strata) {
    if (!s.empty()) used.push_back(std::move(s));
  }
  std::vector<std::size_t> rows;
  for (const auto& s : used) rows.push_back(s.size());
  const auto totals = largest_remainder(corpus.size(), ratios);
  const auto cells = detail::controlled_rounding(rows, totals, ratios);

  Rng rng(seed);
  std::array<std::vector<std::string>, 3> assigned;
  for (std::size_t g = 0; g < used.size(); ++g) {
    auto ids = used[g];
    rng.shuffle(ids);
    std::size_t pos = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t k = 0; k < cells[g][c]; ++k) assigned[c].push_back(ids[pos++]);
    }
  }

  // Report ids in corpus order.
  std::unordered_map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < corpus.size(); ++i) order[corpus.documents()[i].id] = i;
  Corpus::Splits splits;
  for (std::size_t c = 0; c < 3; ++c) {
    auto& ids = assigned[c];
    std::sort(ids.begin(), ids.end(), [&](const auto& a, const auto& b) { return order[a] < order[b]; });
    splits[std::string(kSplitNames[c])] = std::move(ids);
  }
  return Corpus(corpus.documents(), std::move(splits));
}

}  // namespace rigour::corpus
