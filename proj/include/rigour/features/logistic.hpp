#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/features/matrix.hpp"

namespace rigour::features {

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// ln(1 + e^z) without overflow.
inline double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

struct LogisticConfig {
  double l2_lambda = 1e-2;
  std::size_t max_iters = 5000;
  double tol = 1e-6;
};

struct TrainingMeta {
  std::size_t iterations = 0;
  double final_loss = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
};

/// Coefficients live in standardized feature space: a raw count x_j enters as
/// (x_j - means[j]) / scales[j]. Constant columns keep mean 0 and scale 1.
struct ClassifierModel {
  std::vector<std::string> vocabulary;
  std::vector<double> weights;
  double bias = 0.0;
  double l2_lambda = 0.0;
  std::vector<double> means;
  std::vector<double> scales;
  TrainingMeta training_meta;

  double decision(std::span<const Cell> row) const {
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z -= weights[j] * means[j] / scales[j];
    for (const auto& c : row) z += weights[c.col] * static_cast<double>(c.count) / scales[c.col];
    return z;
  }
  double probability(std::span<const Cell> row) const { return sigmoid(decision(row)); }
};

/// Objective (1/n) sum loss_i + lambda ||w||^2 over standardized columns.
/// Parameters are packed as [w_0 .. w_{d-1}, b]; the bias is not penalized.
class LogisticObjective {
 public:
  LogisticObjective(const FeatureMatrix& matrix, std::span<const RigourLabel> labels, double l2_lambda)
      : matrix_(matrix), lambda_(l2_lambda) {
    if (labels.size() != matrix.num_rows()) throw std::invalid_argument("label count does not match rows");
    if (matrix.num_rows() == 0) throw EmptyCorpus();
    if (l2_lambda < 0) throw std::invalid_argument("l2_lambda must be non-negative");
    std::size_t pos = 0;
    for (auto l : labels) {
      y_.push_back(encode(l) != 0);
      pos += encode(l);
    }
    if (pos == 0 || pos == labels.size()) throw SingleClassLabels();

    const auto d = matrix.num_cols();
    const double n = static_cast<double>(matrix.num_rows());
    std::vector<double> sum(d, 0.0), sum_sq(d, 0.0);
    for (const auto& row : matrix.rows) {
      for (const auto& c : row) {
        const double v = c.count;
        sum[c.col] += v;
        sum_sq[c.col] += v * v;
      }
    }
    means_.assign(d, 0.0);
    scales_.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
      const double m = sum[j] / n;
      const double var = sum_sq[j] / n - m * m;
      if (var > 1e-12 * std::max(1.0, m * m)) {
        means_[j] = m;
        scales_[j] = std::sqrt(var);
      }
    }
  }

  std::size_t dimension() const noexcept { return means_.size() + 1; }
  const std::vector<double>& means() const noexcept { return means_; }
  const std::vector<double>& scales() const noexcept { return scales_; }

  double loss(std::span<const double> params) const {
    const auto z = margins(params);
    double total = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) total += y_[i] ? softplus(-z[i]) : softplus(z[i]);
    return total / static_cast<double>(z.size()) + penalty(params);
  }

  /// Loss and gradient in one pass; returns the loss.
  double evaluate(std::span<const double> params, std::vector<double>& grad) const {
    const auto d = means_.size();
    const auto z = margins(params);
    const double n = static_cast<double>(z.size());
    grad.assign(d + 1, 0.0);
    double total = 0.0, r_sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
      // Written per class so flipping every label exactly negates the residual.
      double r;
      if (y_[i]) {
        r = -sigmoid(-z[i]);
        total += softplus(-z[i]);
      } else {
        r = sigmoid(z[i]);
        total += softplus(z[i]);
      }
      r_sum += r;
      for (const auto& c : matrix_.rows[i]) grad[c.col] += r * static_cast<double>(c.count);
    }
    for (std::size_t j = 0; j < d; ++j) {
      grad[j] = (grad[j] - means_[j] * r_sum) / (scales_[j] * n) + 2.0 * lambda_ * params[j];
    }
    grad[d] = r_sum / n;
    return total / n + penalty(params);
  }

  std::vector<double> gradient(std::span<const double> params) const {
    std::vector<double> g;
    evaluate(params, g);
    return g;
  }

 private:
  std::vector<double> margins(std::span<const double> params) const {
    const auto d = means_.size();
    double offset = params[d];
    std::vector<double> eff(d);
    for (std::size_t j = 0; j < d; ++j) {
      eff[j] = params[j] / scales_[j];
      offset -= params[j] * means_[j] / scales_[j];
    }
    std::vector<double> z(matrix_.num_rows(), offset);
    for (std::size_t i = 0; i < z.size(); ++i) {
      for (const auto& c : matrix_.rows[i]) z[i] += eff[c.col] * static_cast<double>(c.count);
    }
    return z;
  }

  double penalty(std::span<const double> params) const {
    double s = 0.0;
    for (std::size_t j = 0; j + 1 < params.size(); ++j) s += params[j] * params[j];
    return lambda_ * s;
  }

  const FeatureMatrix& matrix_;
  double lambda_;
  std::vector<bool> y_;
  std::vector<double> means_, scales_;
};

namespace detail {
inline double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace detail

/// Full-batch gradient descent from zero. Trial steps use the Barzilai-Borwein
/// length and are backtracked until the Armijo condition holds. Not reaching
/// `tol` is reported through training_meta.converged, not thrown.
inline ClassifierModel fit_logistic_regression(const FeatureMatrix& matrix, std::span<const RigourLabel> labels,
                                               const LogisticConfig& config = {}) {
  const LogisticObjective objective(matrix, labels, config.l2_lambda);
  const auto dim = objective.dimension();
  std::vector<double> x(dim, 0.0), g, x_new(dim), g_new;
  double f = objective.evaluate(x, g);
  double step = 1.0;
  std::vector<double> prev_x, prev_g;
  TrainingMeta meta;

  constexpr double kArmijo = 1e-4;
  while (meta.iterations < config.max_iters) {
    meta.gradient_norm = detail::inf_norm(g);
    if (meta.gradient_norm < config.tol) {
      meta.converged = true;
      break;
    }
    if (!prev_x.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double s = x[k] - prev_x[k], yk = g[k] - prev_g[k];
        ss += s * s;
        sy += s * yk;
      }
      if (sy > 0.0 && std::isfinite(ss / sy)) step = ss / sy;
    }
    double g_sq = 0.0;
    for (double v : g) g_sq += v * v;
    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      for (std::size_t k = 0; k < dim; ++k) x_new[k] = x[k] - step * g[k];
      const double f_new = objective.evaluate(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f - kArmijo * step * g_sq) {
        prev_x = x;
        prev_g = g;
        x.swap(x_new);
        g.swap(g_new);
        f = f_new;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++meta.iterations;
    if (!accepted) break;
  }
  meta.gradient_norm = detail::inf_norm(g);
  meta.converged = meta.gradient_norm < config.tol;
  meta.final_loss = f;

  ClassifierModel model;
  model.vocabulary = matrix.vocabulary;
  model.weights.assign(x.begin(), x.end() - 1);
  model.bias = x.back();
  model.l2_lambda = config.l2_lambda;
  model.means = objective.means();
  model.scales = objective.scales();
  model.training_meta = meta;
  return model;
}

/// Fits on a column subset and widens the model back to the full vocabulary;
/// unselected columns get weight 0.
inline ClassifierModel fit_on_columns(const FeatureMatrix& matrix, std::span<const RigourLabel> labels,
                                      const std::vector<std::size_t>& columns, const LogisticConfig& config = {}) {
  const auto sub = matrix.select_columns(columns);
  auto fitted = fit_logistic_regression(sub, labels, config);
  ClassifierModel model;
  model.vocabulary = matrix.vocabulary;
  model.weights.assign(matrix.num_cols(), 0.0);
  model.means.assign(matrix.num_cols(), 0.0);
  model.scales.assign(matrix.num_cols(), 1.0);
  for (std::size_t k = 0; k < columns.size(); ++k) {
    model.weights[columns[k]] = fitted.weights[k];
    model.means[columns[k]] = fitted.means[k];
    model.scales[columns[k]] = fitted.scales[k];
  }
  model.bias = fitted.bias;
  model.l2_lambda = fitted.l2_lambda;
  model.training_meta = fitted.training_meta;
  return model;
}

/// Projects a matrix built over another vocabulary onto the model's.
inline FeatureMatrix align_to(const FeatureMatrix& matrix, const std::vector<std::string>& vocabulary) {
  std::unordered_map<std::string, std::uint32_t> col;
  for (std::size_t j = 0; j < vocabulary.size(); ++j) col.emplace(vocabulary[j], static_cast<std::uint32_t>(j));
  FeatureMatrix out;
  out.vocabulary = vocabulary;
  out.binarized = matrix.binarized;
  for (const auto& row : matrix.rows) {
    std::vector<Cell> r;
    for (const auto& c : row) {
      auto it = col.find(matrix.vocabulary[c.col]);
      if (it != col.end()) r.push_back({it->second, c.count});
    }
    std::sort(r.begin(), r.end(), [](const Cell& a, const Cell& b) { return a.col < b.col; });
    out.rows.push_back(std::move(r));
  }
  return out;
}

struct ClassifierMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;
};

/// Metrics from predicted and true labels; FourStar is the positive class.
inline ClassifierMetrics confusion_metrics(std::span<const RigourLabel> predicted, std::span<const RigourLabel> truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("prediction count does not match labels");
  ClassifierMetrics m;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == RigourLabel::FourStar, t = truth[i] == RigourLabel::FourStar;
    if (p && t) ++m.tp;
    else if (p) ++m.fp;
    else if (t) ++m.fn;
    else ++m.tn;
  }
  const auto ratio = [](std::size_t a, std::size_t b, bool& undefined) {
    undefined = b == 0;
    return undefined ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
  };
  bool acc_undefined = false;
  m.accuracy = ratio(m.tp + m.tn, truth.size(), acc_undefined);
  m.precision = ratio(m.tp, m.tp + m.fp, m.precision_undefined);
  m.recall = ratio(m.tp, m.tp + m.fn, m.recall_undefined);
  m.f1 = ratio(2 * m.tp, 2 * m.tp + m.fp + m.fn, m.f1_undefined);
  return m;
}

inline std::vector<RigourLabel> predict(const ClassifierModel& model, const FeatureMatrix& matrix) {
  if (matrix.vocabulary != model.vocabulary) throw std::invalid_argument("matrix vocabulary differs from the model's");
  std::vector<RigourLabel> out;
  out.reserve(matrix.num_rows());
  for (const auto& row : matrix.rows) {
    out.push_back(model.probability(row) >= 0.5 ? RigourLabel::FourStar : RigourLabel::NonFourStar);
  }
  return out;
}

inline ClassifierMetrics evaluate_classifier(const ClassifierModel& model, const FeatureMatrix& matrix,
                                             std::span<const RigourLabel> labels) {
  const auto predicted = predict(model, matrix);
  return confusion_metrics(predicted, labels);
}

}  // namespace rigour::features
