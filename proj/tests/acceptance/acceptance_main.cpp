// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 on any
// failure.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rigour/app.hpp"
#include "rigour/certainty.hpp"
#include "rigour/core/files.hpp"
#include "rigour/criteria.hpp"
#include "rigour/embed.hpp"
#include "rigour/features.hpp"
#include "rigour/fixtures/synthetic.hpp"
#include "rigour/salience.hpp"
#include "support/oracles.hpp"

using namespace rigour;
namespace fs = std::filesystem;

namespace {

constexpr auto F = RigourLabel::FourStar;
constexpr auto N = RigourLabel::NonFourStar;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<RigourLabel> labels_of(const std::vector<int>& y) {
  std::vector<RigourLabel> out;
  for (int v : y) out.push_back(v ? F : N);
  return out;
}

features::FeatureMatrix dense_matrix(const std::vector<std::vector<std::uint32_t>>& rows, bool binarized) {
  features::FeatureMatrix m;
  for (std::size_t j = 0; j < rows[0].size(); ++j) m.vocabulary.push_back("f" + std::to_string(j));
  for (const auto& r : rows) {
    std::vector<features::Cell> cells;
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j]) cells.push_back({static_cast<std::uint32_t>(j), r[j]});
    }
    m.rows.push_back(std::move(cells));
  }
  m.binarized = binarized;
  return m;
}

features::FeatureMatrix column(const std::vector<int>& x) {
  std::vector<std::vector<std::uint32_t>> rows;
  for (int v : x) rows.push_back({static_cast<std::uint32_t>(v)});
  return dense_matrix(rows, true);
}

// 1 ---------------------------------------------------------------------
Outcome mi_oracle() {
  Outcome o;
  const auto t0 = Clock::now();
  Rng rng(1001);
  double worst = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto n = 2 + rng.below(49);
    std::vector<int> x(n), y(n);
    for (auto& v : x) v = static_cast<int>(rng.below(2));
    for (auto& v : y) v = static_cast<int>(rng.below(2));
    y[0] = 0;
    y[1] = 1;
    const double got = features::mutual_information(column(x), labels_of(y))[0];
    worst = std::max(worst, std::abs(got - oracle::mutual_information(x, y)));
  }
  o.require(worst <= 1e-12, "max |MI - oracle| = " + std::to_string(worst));
  for (int a = 1; a <= 5; ++a) {
    for (int b = 1; b <= 5; ++b) {
      std::vector<int> x, y;
      const int cells[2][2] = {{a * b, a * 2 * b}, {3 * a * b, 3 * a * 2 * b}};
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          for (int k = 0; k < cells[i][j]; ++k) {
            x.push_back(i);
            y.push_back(j);
          }
        }
      }
      const double mi = features::mutual_information(column(x), labels_of(y))[0];
      o.require(mi == 0.0, "product-form table gave MI " + std::to_string(mi));
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "took " + std::to_string(secs) + " s");
  if (o.pass) o.detail = "max err " + std::to_string(worst) + ", " + std::to_string(secs) + " s";
  return o;
}

// 2 ---------------------------------------------------------------------
Outcome logistic() {
  Outcome o;
  Rng rng(2024);
  std::vector<std::vector<std::uint32_t>> rows;
  std::vector<std::vector<double>> x;
  std::vector<int> y;
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
    rows.push_back(r);
    x.push_back(xr);
    y.push_back(rng.uniform() < 1.0 / (1.0 + std::exp(-z)) ? 1 : 0);
  }
  const auto m = dense_matrix(rows, false);
  const auto labels = labels_of(y);
  const double lambda = 1e-2;

  const features::LogisticObjective obj(m, labels, lambda);
  double worst_fd = 0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> p(obj.dimension());
    for (auto& v : p) v = rng.normal();
    const auto g = obj.gradient(p);
    for (std::size_t k = 0; k < p.size(); ++k) {
      auto hi = p, lo = p;
      hi[k] += 1e-5;
      lo[k] -= 1e-5;
      const double fd = (obj.loss(hi) - obj.loss(lo)) / 2e-5;
      worst_fd = std::max(worst_fd, std::abs(fd - g[k]) / std::max(1.0, std::abs(g[k])));
    }
  }
  o.require(worst_fd <= 1e-6, "finite-difference error " + std::to_string(worst_fd));

  const features::LogisticConfig cfg{.l2_lambda = lambda, .max_iters = 100000, .tol = 1e-11};
  const auto model = features::fit_logistic_regression(m, labels, cfg);
  const oracle::DenseLogistic ref(x, y, lambda);
  const double loss_gap = std::abs(model.training_meta.final_loss - ref.loss(ref.minimize()));
  o.require(loss_gap <= 1e-6, "loss differs from reference by " + std::to_string(loss_gap));

  auto flipped = labels;
  for (auto& l : flipped) l = l == F ? N : F;
  const auto neg = features::fit_logistic_regression(m, flipped, cfg);
  double worst_flip = std::abs(model.bias + neg.bias);
  for (std::size_t j = 0; j < model.weights.size(); ++j) {
    worst_flip = std::max(worst_flip, std::abs(model.weights[j] + neg.weights[j]));
  }
  o.require(worst_flip <= 1e-8, "negation asymmetry " + std::to_string(worst_flip));
  if (o.pass) {
    o.detail = "fd " + std::to_string(worst_fd) + ", loss gap " + std::to_string(loss_gap) + ", flip " +
               std::to_string(worst_flip);
  }
  return o;
}

// 3 ---------------------------------------------------------------------
Outcome kendall() {
  Outcome o;
  Rng rng(3003);
  std::size_t checked = 0;
  double worst_p = 0;
  for (int t = 0; t < 5000; ++t) {
    const auto n = 2 + rng.below(39);
    std::vector<int> y(n);
    std::vector<double> x(n);
    for (auto& v : y) v = static_cast<int>(rng.below(2));
    y[0] = 1;
    y[1] = 0;
    rng.shuffle(y);
    const auto grid = 2 + rng.below(n);
    for (auto& v : x) v = static_cast<double>(rng.below(grid));
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) x[0] += 1;

    const auto r = salience::kendall_tau(labels_of(y), x);
    const auto pairs = oracle::count_pairs(y, x);
    o.require(r.concordant == pairs.concordant && r.discordant == pairs.discordant, "pair counts differ");
    o.require(r.tau == oracle::kendall_tau_b(y, x), "tau differs at n=" + std::to_string(n));

    auto cubed = x;
    for (auto& v : cubed) v = v * v * v + 5.0;
    const auto rc = salience::kendall_tau(labels_of(y), cubed);
    o.require(rc.tau == r.tau && rc.p_value == r.p_value, "not invariant under x^3+5");

    if (n <= 8) {
      worst_p = std::max(worst_p, std::abs(r.p_value - oracle::permutation_p_value(y, x)));
    }
    ++checked;
  }
  o.require(worst_p <= 0.02, "p-value error " + std::to_string(worst_p));
  if (o.pass) o.detail = std::to_string(checked) + " instances, max p error " + std::to_string(worst_p);
  return o;
}

// 4 ---------------------------------------------------------------------
Outcome subset_search() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto corpus = corpus::ingest_corpus(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "salience_corpus.jsonl");
  const auto reg = criteria::load_registry(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "registry8.json");
  o.require(corpus.size() == 200 && reg.size() == 8, "unexpected fixture shape");
  embed::MockEmbeddingProvider e({.record_calls = false});
  const auto tv = [&](const std::string& t) { return e.token_vector(t); };
  const auto off = e.offset_vector();

  std::vector<int> y;
  for (auto l : corpus.labels()) y.push_back(l == F);
  std::vector<std::vector<double>> docs;
  for (const auto& d : corpus.documents()) docs.push_back(oracle::token_mean(text::words(d.text()), tv));
  std::uint32_t brute_best = 0;
  double brute_tau = -2;
  for (std::uint32_t mask = 1; mask < 256; ++mask) {
    std::string q;
    for (std::size_t i = 0; i < reg.size(); ++i) {
      if ((mask >> i) & 1u) q += reg[i].name + " " + reg[i].definition + " ";
    }
    const auto qv = oracle::token_mean(text::words(q), tv, &off);
    std::vector<double> sims;
    for (const auto& d : docs) sims.push_back(oracle::cosine(qv, d));
    const double tau = oracle::kendall_tau_b(y, sims);
    if (tau > brute_tau) {
      brute_tau = tau;
      brute_best = mask;
    }
  }

  const auto report = salience::search_salient_sets(corpus, reg, e);
  const auto planted = salience::CriteriaSet::from_names(fixtures::planted_criteria_names(), reg);
  o.require(!report.ranked.empty(), "no significant set");
  if (!report.ranked.empty()) {
    o.require(report.ranked[0].set == planted, "top set is not the planted set");
    o.require(report.ranked[0].set.bitmask() == brute_best, "top set differs from brute force");
    o.require(std::abs(report.ranked[0].tau - brute_tau) < 1e-9, "top tau differs from brute force");
  }
  const auto count = salience::enumerate_criteria_sets(criteria::default_registry()).count();
  std::uint64_t visited = 0;
  for (const auto& s : salience::enumerate_criteria_sets(criteria::default_registry())) visited += s.size() > 0;
  o.require(count == 65535 && visited == 65535, "16-criterion enumeration gave " + std::to_string(visited));
  const double secs = seconds_since(t0);
  o.require(secs < 60.0, "took " + std::to_string(secs) + " s");
  if (o.pass) {
    o.detail = "planted set first (tau " + std::to_string(brute_tau) + "), 65535 sets, " + std::to_string(secs) + " s";
  }
  return o;
}

// 5 ---------------------------------------------------------------------
Outcome appended_vs_summed() {
  Outcome o;
  const auto corpus = corpus::ingest_corpus(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "salience_corpus.jsonl");
  const auto reg = criteria::load_registry(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "registry8.json");
  embed::MockEmbeddingProvider e({.record_calls = false});
  const auto labels = corpus.labels();
  const auto docs = salience::embed_corpus(corpus, e);
  const auto set = salience::CriteriaSet::from_names(fixtures::planted_criteria_names(), reg);
  const auto app = salience::summarize_by_class(
      labels, salience::score_documents(set, docs, reg, e, salience::ScoringMode::Appended));
  const auto sum = salience::summarize_by_class(
      labels, salience::score_documents(set, docs, reg, e, salience::ScoringMode::SummedIndividual));
  o.require(app.gap > sum.gap, "appended gap does not exceed summed gap");
  o.detail = "standardized gap appended " + std::to_string(app.gap) + " vs summed " + std::to_string(sum.gap);
  return o;
}

// 6 ---------------------------------------------------------------------
Outcome planted_keyword() {
  Outcome o;
  const auto full = corpus::ingest_corpus(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "keyword_corpus.jsonl");
  const auto split = corpus::split_corpus(full, {0.8, 0.1, 0.1}, 7);
  std::vector<std::string> texts;
  std::vector<RigourLabel> labels;
  for (const auto& d : split.split("train")) {
    texts.push_back(d.text());
    labels.push_back(*d.label);
  }
  const auto a = features::analyze_keywords(texts, labels);
  std::size_t rank = 0;
  for (std::size_t k = 0; k < a.keywords.positive.size(); ++k) {
    if (a.keywords.positive[k].token == "baseline") rank = k + 1;
  }
  o.require(rank >= 1 && rank <= 5, "planted token rank " + std::to_string(rank));
  const auto test = Corpus(split.split("test"));
  std::vector<RigourLabel> truth, pred;
  for (const auto& d : test.documents()) truth.push_back(*d.label);
  for (const auto& p : features::predict_corpus(a.model, test)) pred.push_back(p.label);
  const auto m = features::confusion_metrics(pred, truth);
  o.require(m.f1 >= 0.9, "held-out F1 " + std::to_string(m.f1));
  if (o.pass) {
    o.detail = "rank " + std::to_string(rank) + ", held-out F1 " + std::to_string(m.f1) + " on " +
               std::to_string(truth.size()) + " docs";
  }
  return o;
}

// 7 ---------------------------------------------------------------------
Outcome pooling() {
  Outcome o;
  embed::MockEmbeddingProvider e({.dim = 96, .seed = 9});
  const auto tv = [&](const std::string& t) { return e.token_vector(t); };
  const auto off = e.offset_vector();
  Rng rng(77);
  const std::vector<std::string> vocab = {"rigour", "baseline", "ablation", "dataset", "proof",
                                          "robust", "variance", "seed", "metric", "claim"};
  for (int i = 0; i < 100; ++i) {
    std::string s;
    const auto n = 1 + rng.below(25);
    for (std::size_t k = 0; k < n; ++k) s += (k ? " " : "") + vocab[rng.below(vocab.size())];
    const auto q = embed::embed_query("Retrieve:", s, e);
    const auto d = embed::embed_document(s, e);
    const auto want_q = oracle::token_mean(text::words(s), tv, &off);
    const auto want_d = oracle::token_mean(text::words(s), tv);
    o.require(std::equal(q.values().begin(), q.values().end(), want_q.begin()), "query pooling differs");
    o.require(std::equal(d.values().begin(), d.values().end(), want_d.begin()), "document pooling differs");
  }
  std::size_t doc_calls = 0;
  for (const auto& c : e.calls()) {
    if (c.mode != embed::EmbeddingMode::Document) continue;
    ++doc_calls;
    o.require(!c.instruction, "document request carried an instruction");
  }
  o.require(doc_calls >= 100, "document calls were not recorded");
  if (o.pass) o.detail = "100 texts exact, " + std::to_string(doc_calls) + " document calls without instruction";
  return o;
}

// 8 ---------------------------------------------------------------------
Outcome certainty_aggregation() {
  Outcome o;
  std::vector<certainty::SentenceLabel> labels;
  std::vector<certainty::CertaintyPrediction> preds;
  for (std::size_t i = 0; i < 40; ++i) {
    const Sentence s{"d" + std::to_string(i % 8), i, "x"};
    labels.push_back({s, i % 3 == 0 ? "Baselines" : "Biases", 0.7, i % 8 < 3 ? F : N});
    certainty::CertaintyPrediction p{s.doc_id, s.index, {}};
    for (std::size_t c = 0; c < certainty::kCells; ++c) p.probs[c] = static_cast<double>((i * 7 + c * 3) % 11) / 10.0;
    preds.push_back(p);
  }
  const auto b = certainty::aggregate_certainty(labels, preds);
  double worst = 0;
  for (const auto& cb : b.criteria) {
    for (std::size_t c = 0; c < certainty::kCells; ++c) {
      double s4 = 0, sn = 0, n4 = 0, nn = 0;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].criterion != cb.criterion) continue;
        if (labels[i].doc_label == F) {
          s4 += preds[i].probs[c];
          n4 += 1;
        } else {
          sn += preds[i].probs[c];
          nn += 1;
        }
      }
      worst = std::max(worst, std::abs(*cb.cells[c].diff - 100.0 * (s4 / n4 - sn / nn)));
    }
  }
  o.require(worst <= 1e-9, "diff error " + std::to_string(worst));

  auto swapped = labels;
  for (auto& l : swapped) l.doc_label = l.doc_label == F ? N : F;
  const auto bs = certainty::aggregate_certainty(swapped, preds);
  for (std::size_t k = 0; k < b.criteria.size(); ++k) {
    for (std::size_t c = 0; c < certainty::kCells; ++c) {
      o.require(*b.criteria[k].cells[c].diff == -*bs.criteria[k].cells[c].diff, "swap is not exactly antisymmetric");
    }
  }

  // Survival count against independently computed best similarities.
  const auto corpus = corpus::ingest_corpus(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "salience_corpus.jsonl");
  const auto reg = criteria::load_registry(fs::path(RIGOUR_DATA_DIR) / "fixtures" / "registry8.json");
  embed::MockEmbeddingProvider e({.record_calls = false});
  const auto tv = [&](const std::string& t) { return e.token_vector(t); };
  const auto off = e.offset_vector();
  const auto sents = certainty::corpus_sentences(corpus);
  std::vector<std::vector<double>> queries;
  for (const auto& c : reg.criteria()) queries.push_back(oracle::token_mean(text::words(c.name + " " + c.definition), tv, &off));
  std::size_t expected = 0;
  for (const auto& s : sents) {
    const auto v = oracle::token_mean(text::words(s.text), tv);
    double best = -2;
    for (const auto& q : queries) best = std::max(best, oracle::cosine(q, v));
    expected += best >= 0.5;
  }
  const auto kept = certainty::label_sentences(sents, corpus, reg, e, 0.5).size();
  o.require(kept == expected, "kept " + std::to_string(kept) + " vs " + std::to_string(expected));
  if (o.pass) {
    o.detail = "max diff error " + std::to_string(worst) + ", " + std::to_string(kept) + "/" +
               std::to_string(sents.size()) + " sentences survive";
  }
  return o;
}

// 9 ---------------------------------------------------------------------
Outcome golden_strings() {
  Outcome o;
  o.require(criteria::kDefinitionPromptTemplate ==
                "Give the definition of \"[keyword]\" in the context of Computer science and Machine learning. "
                "In the format: [keyword]: Refers to [definition]",
            "definition prompt template differs");
  o.require(criteria::definition_prompt("Baselines") ==
                "Give the definition of \"Baselines\" in the context of Computer science and Machine learning. "
                "In the format: Baselines: Refers to [definition]",
            "filled prompt differs");
  o.require(salience::kRetrievalInstruction ==
                "Given the following definitions, retrieve the appropriate document that contains the following "
                "criteria:",
            "retrieval instruction differs");
  if (o.pass) o.detail = "prompt and instruction byte-equal";
  return o;
}

// 10 --------------------------------------------------------------------
Outcome determinism() {
  Outcome o;
  const auto base = fs::temp_directory_path() / ("rigour-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  const auto cfg_path = fs::path(RIGOUR_DATA_DIR) / "fixtures" / "config.json";
  std::vector<std::map<std::string, std::string>> trees;
  for (const char* name : {"a", "b"}) {
    auto cfg = app::load_config(cfg_path);
    cfg.out_dir = base / name;
    app::RunOptions opt;
    opt.force_mock = true;
    opt.resume = false;
    app::run_pipeline(cfg, opt);
    std::map<std::string, std::string> tree;
    const auto reports = app::Layout::under(cfg.out_dir).reports;
    for (const auto& e : fs::recursive_directory_iterator(reports)) {
      if (e.is_regular_file()) tree[fs::relative(e.path(), reports).generic_string()] = files::read(e.path());
    }
    trees.push_back(std::move(tree));
  }
  o.require(!trees[0].empty(), "no report files");
  o.require(trees[0] == trees[1], "report files differ between runs");
  if (o.pass) o.detail = std::to_string(trees[0].size()) + " report files byte-identical";
  fs::remove_all(base);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"mutual information oracle", mi_oracle},
      {"logistic regression correctness", logistic},
      {"kendall tau-b oracle", kendall},
      {"subset search recovery", subset_search},
      {"appended vs summed separation", appended_vs_summed},
      {"planted keyword recovery", planted_keyword},
      {"token-mean pooling", pooling},
      {"certainty aggregation", certainty_aggregation},
      {"golden strings", golden_strings},
      {"end-to-end determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
