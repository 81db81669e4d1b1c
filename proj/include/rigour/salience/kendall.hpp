#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rigour/corpus/types.hpp"

namespace rigour::salience {

/// Above this many distinct label arrangements the p-value falls back to the
/// normal approximation.
inline constexpr std::uint64_t kExactPermutationLimit = 20000;

struct KendallResult {
  double tau = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  /// False for fewer than two items, a single label class or constant scores.
  bool defined = false;
  bool exact_p = false;
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
};

namespace detail {

/// C(n, k), or limit + 1 once it exceeds `limit`.
inline std::uint64_t capped_binomial(std::uint64_t n, std::uint64_t k, std::uint64_t limit) {
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > limit) return limit + 1;
  }
  return r;
}

/// Score ties as group ids along ascending score order.
struct ScoreGroups {
  std::vector<std::size_t> order;  // indices sorted by score
  std::vector<std::size_t> group;  // group[r] for rank position r
  std::vector<std::size_t> sizes;
};

inline ScoreGroups group_scores(std::span<const double> scores) {
  ScoreGroups g;
  g.order.resize(scores.size());
  std::iota(g.order.begin(), g.order.end(), 0);
  std::stable_sort(g.order.begin(), g.order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  g.group.resize(scores.size());
  for (std::size_t r = 0; r < g.order.size(); ++r) {
    if (r == 0 || scores[g.order[r]] != scores[g.order[r - 1]]) g.sizes.push_back(0);
    g.group[r] = g.sizes.size() - 1;
    ++g.sizes.back();
  }
  return g;
}

/// Concordant and discordant pair counts for binary labels given as
/// `positive(r)` over rank positions.
template <typename IsPositive>
std::pair<std::int64_t, std::int64_t> count_pairs(const ScoreGroups& g, IsPositive positive) {
  std::int64_t c = 0, d = 0, pos_before = 0, neg_before = 0;
  std::size_t r = 0;
  for (std::size_t k = 0; k < g.sizes.size(); ++k) {
    std::int64_t p = 0, q = 0;
    for (std::size_t e = 0; e < g.sizes[k]; ++e, ++r) (positive(r) ? p : q) += 1;
    c += p * neg_before;
    d += q * pos_before;
    pos_before += p;
    neg_before += q;
  }
  return {c, d};
}

inline double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace detail

/// Tie-corrected Kendall tau-b between binary labels (FourStar = 1) and real
/// scores, in O(n log n). The two-sided p-value is exact over all label
/// arrangements when there are at most kExactPermutationLimit of them, and
/// otherwise uses the normal approximation with tie-corrected variance.
inline KendallResult kendall_tau(std::span<const RigourLabel> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw std::invalid_argument("labels and scores differ in length");
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("score is NaN");
  }
  KendallResult out;
  const auto n = static_cast<std::int64_t>(labels.size());
  std::int64_t npos = 0;
  for (auto l : labels) npos += encode(l);
  const std::int64_t nneg = n - npos;
  if (n < 2 || npos == 0 || nneg == 0) return out;

  const auto g = detail::group_scores(scores);
  if (g.sizes.size() == 1) return out;

  const auto [c, d] = detail::count_pairs(g, [&](std::size_t r) { return labels[g.order[r]] == RigourLabel::FourStar; });
  out.concordant = c;
  out.discordant = d;
  out.defined = true;

  const std::int64_t s = c - d;
  const std::int64_t n0 = n * (n - 1) / 2;
  const std::int64_t n1 = npos * (npos - 1) / 2 + nneg * (nneg - 1) / 2;
  std::int64_t n2 = 0;
  for (auto t : g.sizes) n2 += static_cast<std::int64_t>(t) * (static_cast<std::int64_t>(t) - 1) / 2;
  out.tau = static_cast<double>(s) / std::sqrt(static_cast<double>(n0 - n1) * static_cast<double>(n0 - n2));

  const auto arrangements = detail::capped_binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(npos),
                                                    kExactPermutationLimit);
  if (n <= 63 && arrangements <= kExactPermutationLimit) {
    // Visit every placement of npos positives over the rank positions.
    std::uint64_t hits = 0, total = 0;
    const std::int64_t target = s < 0 ? -s : s;
    std::uint64_t v = (std::uint64_t{1} << npos) - 1;
    const std::uint64_t stop = std::uint64_t{1} << n;
    while (v < stop) {
      const auto [ci, di] = detail::count_pairs(g, [&](std::size_t r) { return ((v >> r) & 1u) != 0; });
      const std::int64_t si = ci - di;
      if ((si < 0 ? -si : si) >= target) ++hits;
      ++total;
      const std::uint64_t t = v | (v - 1);
      v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
    }
    out.p_value = static_cast<double>(hits) / static_cast<double>(total);
    out.exact_p = true;
    return out;
  }

  // Normal approximation; variance of S under ties in both variables.
  const double nd = static_cast<double>(n);
  const double m = nd * (nd - 1.0);
  const auto tie_terms = [](std::span<const std::int64_t> counts) {
    double pairs = 0, cubic = 0, var = 0;
    for (auto t64 : counts) {
      const double t = static_cast<double>(t64);
      pairs += t * (t - 1.0) / 2.0;
      cubic += t * (t - 1.0) * (t - 2.0);
      var += t * (t - 1.0) * (2.0 * t + 5.0);
    }
    return std::array<double, 3>{pairs, cubic, var};
  };
  const std::int64_t label_counts[2] = {npos, nneg};
  std::vector<std::int64_t> score_counts(g.sizes.begin(), g.sizes.end());
  const auto x = tie_terms(label_counts);
  const auto y = tie_terms(score_counts);
  double var = (m * (2.0 * nd + 5.0) - x[2] - y[2]) / 18.0 + 2.0 * x[0] * y[0] / m;
  if (n > 2) var += x[1] * y[1] / (9.0 * m * (nd - 2.0));
  out.p_value = var > 0 ? std::min(1.0, detail::normal_two_sided(static_cast<double>(s) / std::sqrt(var))) : 1.0;
  return out;
}

}  // namespace rigour::salience
