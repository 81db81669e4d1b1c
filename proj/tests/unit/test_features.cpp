#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "rigour/corpus.hpp"
#include "rigour/features.hpp"
#include "rigour/fixtures/synthetic.hpp"
#include "support/oracles.hpp"

using namespace rigour;
using namespace rigour::features;

namespace {

constexpr auto F = RigourLabel::FourStar;
constexpr auto N = RigourLabel::NonFourStar;

std::vector<std::vector<std::uint32_t>> dense(const FeatureMatrix& m) {
  std::vector<std::vector<std::uint32_t>> out;
  for (std::size_t r = 0; r < m.num_rows(); ++r) out.push_back(m.dense_row(r));
  return out;
}

FeatureMatrix from_dense(const std::vector<std::vector<std::uint32_t>>& rows, bool binarized = false) {
  FeatureMatrix m;
  for (std::size_t j = 0; j < rows[0].size(); ++j) m.vocabulary.push_back("f" + std::to_string(j));
  for (const auto& r : rows) {
    std::vector<Cell> cells;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j]) cells.push_back({static_cast<std::uint32_t>(j), r[j]});
    }
    m.rows.push_back(std::move(cells));
  }
  m.binarized = binarized;
  return m;
}

FeatureMatrix binary_column(const std::vector<int>& x) {
  std::vector<std::vector<std::uint32_t>> rows;
  for (int v : x) rows.push_back({static_cast<std::uint32_t>(v)});
  return from_dense(rows, true);
}

std::vector<RigourLabel> labels_of(const std::vector<int>& y) {
  std::vector<RigourLabel> out;
  for (int v : y) out.push_back(v ? F : N);
  return out;
}

std::vector<RigourLabel> negated(std::vector<RigourLabel> l) {
  for (auto& x : l) x = x == F ? N : F;
  return l;
}

/// Fixed 20x5 count data with noisy labels (not separable).
struct SmallDataset {
  FeatureMatrix matrix;
  std::vector<RigourLabel> labels;
  std::vector<std::vector<double>> x;
  std::vector<int> y;
};

SmallDataset small_dataset() {
  Rng rng(2024);
  SmallDataset s;
  std::vector<std::vector<std::uint32_t>> rows;
  const double w[5] = {0.9, -0.6, 0.3, 0.0, -0.2};
  for (int i = 0; i < 20; ++i) {
    std::vector<std::uint32_t> r(5);
    std::vector<double> xr(5);
    double z = -0.3;
    for (int j = 0; j < 5; ++j) {
      r[j] = static_cast<std::uint32_t>(rng.below(4));
      xr[j] = r[j];
      z += w[j] * xr[j];
    }
    const int yi = rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0;
    rows.push_back(r);
    s.x.push_back(xr);
    s.y.push_back(yi);
  }
  s.matrix = from_dense(rows);
  s.labels = labels_of(s.y);
  return s;
}

}  // namespace

TEST(Matrix, DirectCounts) {
  const auto m = build_feature_matrix(std::vector<std::string>{"aa bb aa", "bb cc"}, false, 1);
  EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"aa", "bb", "cc"}));
  EXPECT_EQ(dense(m), (std::vector<std::vector<std::uint32_t>>{{2, 1, 0}, {0, 1, 1}}));
  const auto b = build_feature_matrix(std::vector<std::string>{"aa bb aa", "bb cc"}, true, 1);
  EXPECT_EQ(dense(b), (std::vector<std::vector<std::uint32_t>>{{1, 1, 0}, {0, 1, 1}}));
  EXPECT_TRUE(b.binarized);
}

TEST(Matrix, TokenRules) {
  const auto m = build_feature_matrix(std::vector<std::string>{"[MASK] Deep x 3d mask [MASK]", "deep"}, false, 1);
  EXPECT_EQ(m.vocabulary, (std::vector<std::string>{"deep", "mask"}));
  EXPECT_EQ(m.at(0, 0), 1u);
  EXPECT_EQ(m.at(0, 1), 1u);
}

TEST(Matrix, MinDfAndEmptyVocabulary) {
  const std::vector<std::string> texts = {"aa bb", "aa cc", "aa dd"};
  EXPECT_EQ(build_feature_matrix(texts, false, 2).vocabulary, (std::vector<std::string>{"aa"}));
  EXPECT_THROW(build_feature_matrix(texts, false, 4), EmptyVocabulary);
}

TEST(Matrix, InvariantsOnFixture) {
  const auto m = build_feature_matrix(fixtures::keyword_corpus(), true);
  EXPECT_TRUE(std::is_sorted(m.vocabulary.begin(), m.vocabulary.end()));
  EXPECT_EQ(std::adjacent_find(m.vocabulary.begin(), m.vocabulary.end()), m.vocabulary.end());
  for (std::size_t r = 0; r < m.num_rows(); ++r) {
    const auto row = m.dense_row(r);
    EXPECT_EQ(row.size(), m.num_cols());
    for (auto v : row) EXPECT_LE(v, 1u);
  }
}

TEST(MutualInformation, PerfectDependence) {
  const std::vector<int> y = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  EXPECT_NEAR(mutual_information(binary_column(y), labels_of(y))[0], std::log(2.0), 1e-15);
}

TEST(MutualInformation, IndependenceIsZero) {
  const std::vector<int> x = {0, 0, 1, 1, 0, 0, 1, 1};
  const std::vector<int> y = {0, 1, 0, 1, 0, 1, 0, 1};
  EXPECT_NEAR(mutual_information(binary_column(x), labels_of(y))[0], 0.0, 1e-15);
}

TEST(MutualInformation, HandTable) {
  // counts [[2,1],[1,2]]: x=0 -> y {0,0,1}, x=1 -> y {0,1,1}
  const std::vector<int> x = {0, 0, 0, 1, 1, 1};
  const std::vector<int> y = {0, 0, 1, 0, 1, 1};
  const double by_hand = 2 * (2.0 / 6) * std::log((2.0 / 6) / 0.25) + 2 * (1.0 / 6) * std::log((1.0 / 6) / 0.25);
  EXPECT_NEAR(mutual_information(binary_column(x), labels_of(y))[0], by_hand, 1e-12);
  EXPECT_NEAR(oracle::mutual_information(x, y), by_hand, 1e-12);
}

TEST(MutualInformation, RandomInstancesAgainstOracle) {
  Rng rng(99);
  for (int t = 0; t < 1000; ++t) {
    const auto n = 2 + rng.below(49);
    std::vector<int> x(n), y(n);
    for (auto& v : x) v = static_cast<int>(rng.below(2));
    for (auto& v : y) v = static_cast<int>(rng.below(2));
    y[0] = 0;
    y[1] = 1;
    const double got = mutual_information(binary_column(x), labels_of(y))[0];
    EXPECT_NEAR(got, oracle::mutual_information(x, y), 1e-12);
    EXPECT_GE(got, 0.0);
    // Symmetric in (X, Y) and invariant to renaming the label.
    if (std::count(x.begin(), x.end(), 1) % static_cast<long>(n) != 0) {
      EXPECT_NEAR(got, mutual_information(binary_column(y), labels_of(x))[0], 1e-12);
    }
    EXPECT_NEAR(got, mutual_information(binary_column(x), negated(labels_of(y)))[0], 1e-12);
  }
}

TEST(MutualInformation, ProductFormTables) {
  for (int a = 1; a <= 4; ++a) {
    for (int b = 1; b <= 4; ++b) {
      // Joint counts a*c x b*d with row/column factors (a, 2a) and (b, 3b).
      std::vector<int> x, y;
      const int cells[2][2] = {{a * b, a * 3 * b}, {2 * a * b, 2 * a * 3 * b}};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          for (int k = 0; k < cells[i][j]; ++k) {
            x.push_back(i);
            y.push_back(j);
          }
        }
      }
      EXPECT_NEAR(mutual_information(binary_column(x), labels_of(y))[0], 0.0, 1e-15);
    }
  }
}

TEST(MutualInformation, Errors) {
  EXPECT_THROW(mutual_information(binary_column({0, 1}), labels_of({1, 1})), SingleClassLabels);
  auto m = binary_column({0, 1});
  m.binarized = false;
  EXPECT_THROW(mutual_information(m, labels_of({0, 1})), std::invalid_argument);
}

TEST(Percentile, Examples) {
  const std::vector<double> s = {0.1, 0.9, 0.5, 0.4};
  EXPECT_EQ(select_percentile(s, 50), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(select_percentile(s, 100), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(select_percentile(std::vector<double>{0.5, 0.5, 0.5}, 34), (std::vector<std::size_t>{0, 1}));
  EXPECT_THROW(select_percentile(s, 0), std::invalid_argument);
  EXPECT_THROW(select_percentile(s, 101), std::invalid_argument);
}

TEST(Percentile, RandomScoresAgainstFullSort) {
  Rng rng(8);
  std::vector<double> s(1000);
  for (auto& v : s) v = rng.uniform();
  const auto sel = select_percentile(s, 10);
  ASSERT_EQ(sel.size(), 100u);
  EXPECT_TRUE(std::is_sorted(sel.begin(), sel.end()));
  auto sorted = s;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double min_in = 1e9;
  for (auto i : sel) min_in = std::min(min_in, s[i]);
  EXPECT_EQ(min_in, sorted[99]);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::binary_search(sel.begin(), sel.end(), i)) {
      EXPECT_LE(s[i], min_in);
    }
  }
  // Idempotent: re-selecting with the losers pushed down keeps the same set.
  auto masked = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!std::binary_search(sel.begin(), sel.end(), i)) masked[i] = -1.0;
  }
  EXPECT_EQ(select_percentile(masked, 10), sel);
}

TEST(Logistic, SeparatedSingleFeature) {
  const auto m = from_dense({{0}, {2}, {0}, {2}});
  const auto model = fit_logistic_regression(m, labels_of({0, 1, 0, 1}), {.l2_lambda = 0.1});
  EXPECT_GT(model.weights[0], 0.0);
  EXPECT_TRUE(std::isfinite(model.weights[0]));
}

TEST(Logistic, HeavyRegularizationGivesPriorLogit) {
  const auto d = small_dataset();
  const auto model = fit_logistic_regression(d.matrix, d.labels, {.l2_lambda = 1e6, .max_iters = 20000, .tol = 1e-12});
  for (double w : model.weights) EXPECT_LT(std::abs(w), 1e-5);
  const double prior = static_cast<double>(std::count(d.y.begin(), d.y.end(), 1)) / 20.0;
  EXPECT_NEAR(model.bias, std::log(prior / (1 - prior)), 1e-4);
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  const auto d = small_dataset();
  const LogisticObjective obj(d.matrix, d.labels, 0.05);
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> p(obj.dimension());
    for (auto& v : p) v = rng.normal();
    const auto g = obj.gradient(p);
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto hi = p, lo = p;
      hi[k] += 1e-5;
      lo[k] -= 1e-5;
      const double fd = (obj.loss(hi) - obj.loss(lo)) / 2e-5;
      EXPECT_LE(std::abs(fd - g[k]), 1e-6 * std::max(1.0, std::abs(g[k]))) << k;
    }
  }
}

TEST(Logistic, ConvergedLossMatchesNewtonReference) {
  const auto d = small_dataset();
  for (double lambda : {1e-3, 1e-2, 0.1}) {
    const auto model = fit_logistic_regression(d.matrix, d.labels, {.l2_lambda = lambda, .max_iters = 100000, .tol = 1e-10});
    EXPECT_TRUE(model.training_meta.converged);
    const oracle::DenseLogistic ref(d.x, d.y, lambda);
    const auto w = ref.minimize();
    EXPECT_NEAR(model.training_meta.final_loss, ref.loss(w), 1e-6);
    for (std::size_t j = 0; j < model.weights.size(); ++j) EXPECT_NEAR(model.weights[j], w[j], 1e-4);
    const LogisticObjective obj(d.matrix, d.labels, lambda);
    EXPECT_LE(model.training_meta.final_loss, obj.loss(std::vector<double>(obj.dimension(), 0.0)));
  }
}

TEST(Logistic, LabelNegationFlipsCoefficients) {
  const auto d = small_dataset();
  const LogisticConfig cfg{.l2_lambda = 1e-2, .max_iters = 100000, .tol = 1e-11};
  const auto a = fit_logistic_regression(d.matrix, d.labels, cfg);
  const auto b = fit_logistic_regression(d.matrix, negated(d.labels), cfg);
  for (std::size_t j = 0; j < a.weights.size(); ++j) EXPECT_NEAR(a.weights[j], -b.weights[j], 1e-8);
  EXPECT_NEAR(a.bias, -b.bias, 1e-8);
}

TEST(Logistic, NotConvergedIsReportedNotThrown) {
  const auto d = small_dataset();
  const auto model = fit_logistic_regression(d.matrix, d.labels, {.l2_lambda = 1e-2, .max_iters = 2, .tol = 1e-12});
  EXPECT_FALSE(model.training_meta.converged);
  EXPECT_EQ(model.training_meta.iterations, 2u);
  for (double w : model.weights) EXPECT_TRUE(std::isfinite(w));
}

TEST(Logistic, Errors) {
  const auto m = from_dense({{1}, {0}});
  EXPECT_THROW(fit_logistic_regression(m, labels_of({1, 1})), SingleClassLabels);
  EXPECT_THROW(fit_logistic_regression(m, labels_of({1})), std::invalid_argument);
}

TEST(Metrics, HandConfusionMatrix) {
  // TP=2, FP=1, FN=1, TN=6
  const auto pred = labels_of({1, 1, 1, 0, 0, 0, 0, 0, 0, 0});
  const auto truth = labels_of({1, 1, 0, 1, 0, 0, 0, 0, 0, 0});
  const auto m = confusion_metrics(pred, truth);
  EXPECT_DOUBLE_EQ(m.precision, 2.0 / 3);
  EXPECT_DOUBLE_EQ(m.recall, 2.0 / 3);
  EXPECT_DOUBLE_EQ(m.f1, 2.0 / 3);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.8);
}

TEST(Metrics, PerfectAndUndefined) {
  const auto truth = labels_of({1, 0, 1});
  const auto perfect = confusion_metrics(truth, truth);
  EXPECT_EQ(perfect.accuracy, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  const auto none = confusion_metrics(labels_of({0, 0}), labels_of({0, 0}));
  EXPECT_TRUE(none.precision_undefined);
  EXPECT_TRUE(none.recall_undefined);
  EXPECT_TRUE(none.f1_undefined);
  EXPECT_EQ(none.f1, 0.0);
}

TEST(Ranking, AllNegativeCoefficientsGiveEmptyPositiveSide) {
  ClassifierModel model;
  model.vocabulary = {"a", "b", "c"};
  model.weights = {-1.0, -2.0, -0.5};
  const std::vector<double> mi = {0.1, 0.2, 0.3};
  const auto r = rank_rigour_keywords(model, mi, 100, 10);
  EXPECT_TRUE(r.positive.empty());
  ASSERT_EQ(r.negative.size(), 3u);
  EXPECT_EQ(r.negative[0].token, "b");
  for (const auto& k : r.negative) EXPECT_EQ(k.label_class, N);
}

TEST(Ranking, PercentileRestrictsAndTopKTruncates) {
  ClassifierModel model;
  model.vocabulary = {"a", "b", "c", "d"};
  model.weights = {3.0, 2.0, 1.0, -1.0};
  const std::vector<double> mi = {0.0, 0.5, 0.4, 0.3};
  const auto r = rank_rigour_keywords(model, mi, 75, 1);
  ASSERT_EQ(r.positive.size(), 1u);
  EXPECT_EQ(r.positive[0].token, "b");
  ASSERT_EQ(r.negative.size(), 1u);
  EXPECT_EQ(r.negative[0].token, "d");
}

TEST(Ranking, PlantedTokenIsTopMiAndTopPositive) {
  const auto corpus = fixtures::keyword_corpus();
  const auto a = analyze_keywords(corpus);
  // Brute-force MI over the binarized presence of every vocabulary token.
  std::vector<int> y;
  for (auto l : corpus.labels()) y.push_back(l == F);
  std::size_t best = 0;
  double best_mi = -1;
  for (std::size_t j = 0; j < a.matrix.num_cols(); ++j) {
    std::vector<int> x;
    for (std::size_t r = 0; r < a.matrix.num_rows(); ++r) x.push_back(a.matrix.at(r, j) > 0);
    const double mi = oracle::mutual_information(x, y);
    if (mi > best_mi) {
      best_mi = mi;
      best = j;
    }
  }
  EXPECT_EQ(a.matrix.vocabulary[best], "baseline");
  std::vector<std::string> top5;
  for (std::size_t k = 0; k < std::min<std::size_t>(5, a.keywords.positive.size()); ++k) {
    top5.push_back(a.keywords.positive[k].token);
  }
  EXPECT_NE(std::find(top5.begin(), top5.end(), "baseline"), top5.end());
  for (const auto& k : a.keywords.positive) EXPECT_GT(k.coefficient, 0.0);
  for (const auto& k : a.keywords.negative) EXPECT_LT(k.coefficient, 0.0);
}

TEST(Ranking, AllowlistKeepsOrder) {
  RankedKeywords r;
  r.positive = {{"a", 0.1, 2.0, F}, {"b", 0.1, 1.0, F}, {"c", 0.1, 0.5, F}};
  const auto f = filter_allowlist(r, parse_allowlist("# kept\nC\n\na\n"));
  ASSERT_EQ(f.positive.size(), 2u);
  EXPECT_EQ(f.positive[0].token, "a");
  EXPECT_EQ(f.positive[1].token, "c");
}

TEST(Io, KeywordsCsvAndPredictionsRoundTrip) {
  RankedKeywords r;
  r.positive = {{"baseline", 0.25, 1.5, F}};
  r.negative = {{"survey", 0.125, -0.75, N}};
  EXPECT_EQ(keywords_csv(r), "token,mi_score,coefficient,class\nbaseline,0.25,1.5,4*\nsurvey,0.125,-0.75,non-4*\n");
  const std::vector<Prediction> p = {{"a", F, 0.9}, {"b", N, 0.1}};
  EXPECT_EQ(parse_predictions(serialize_predictions(p)), p);
  EXPECT_THROW(parse_predictions("{\"id\":\"a\",\"label\":\"5*\",\"score\":0.2}\n"), MalformedRecord);
}

TEST(Classifier, HeldOutF1OnPlantedCorpus) {
  const auto corpus = corpus::split_corpus(fixtures::keyword_corpus(), {0.8, 0.1, 0.1}, 7);
  const auto train = corpus.split("train");
  const auto test = corpus.split("test");
  std::vector<std::string> texts;
  std::vector<RigourLabel> labels;
  for (const auto& d : train) {
    texts.push_back(d.text());
    labels.push_back(*d.label);
  }
  const auto a = analyze_keywords(texts, labels);
  std::vector<RigourLabel> truth;
  for (const auto& d : test) truth.push_back(*d.label);
  const auto preds = predict_corpus(a.model, Corpus(test));
  std::vector<RigourLabel> predicted;
  for (const auto& p : preds) predicted.push_back(p.label);
  EXPECT_GE(confusion_metrics(predicted, truth).f1, 0.9);
}
