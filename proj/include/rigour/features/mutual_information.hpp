#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/features/matrix.hpp"

namespace rigour::features {

/// Plug-in mutual information (nats) of a 2x2 contingency table
/// counts[x][y], with 0 ln 0 = 0.
inline double mutual_information_2x2(const double counts[2][2]) {
  const double n = counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
  if (n <= 0) return 0.0;
  const double px[2] = {(counts[0][0] + counts[0][1]) / n, (counts[1][0] + counts[1][1]) / n};
  const double py[2] = {(counts[0][0] + counts[1][0]) / n, (counts[0][1] + counts[1][1]) / n};
  double mi = 0.0;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const double pxy = counts[x][y] / n;
      if (pxy > 0.0) mi += pxy * std::log(pxy / (px[x] * py[y]));
    }
  }
  // Rounding can leave -1e-17 for independent tables.
  return std::max(0.0, mi);
}

/// MI between each binary feature and the label, in nats.
inline std::vector<double> mutual_information(const FeatureMatrix& matrix, std::span<const RigourLabel> labels) {
  if (!matrix.binarized) throw std::invalid_argument("mutual information needs a binarized matrix");
  if (labels.size() != matrix.num_rows()) throw std::invalid_argument("label count does not match rows");
  std::size_t pos = 0;
  for (auto l : labels) pos += encode(l);
  if (pos == 0 || pos == labels.size()) throw SingleClassLabels();

  std::vector<double> present_pos(matrix.num_cols(), 0.0), present_neg(matrix.num_cols(), 0.0);
  for (std::size_t r = 0; r < matrix.num_rows(); ++r) {
    auto& target = encode(labels[r]) ? present_pos : present_neg;
    for (const auto& c : matrix.rows[r]) target[c.col] += 1.0;
  }
  const double n_pos = static_cast<double>(pos);
  const double n_neg = static_cast<double>(labels.size() - pos);
  std::vector<double> out(matrix.num_cols());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double t[2][2] = {{n_neg - present_neg[j], n_pos - present_pos[j]}, {present_neg[j], present_pos[j]}};
    out[j] = mutual_information_2x2(t);
  }
  return out;
}

/// Indices of the top ceil(percentile/100 * n) scores, ties to the lower
/// index, returned ascending.
inline std::vector<std::size_t> select_percentile(std::span<const double> scores, double percentile) {
  if (!(percentile > 0.0 && percentile <= 100.0)) throw std::invalid_argument("percentile must be in (0, 100]");
  const auto n = scores.size();
  // Subtract a hair so 10% of 1000 does not become 101 through rounding.
  auto keep = static_cast<std::size_t>(std::ceil(percentile / 100.0 * static_cast<double>(n) - 1e-9));
  keep = std::min(keep, n);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace rigour::features
