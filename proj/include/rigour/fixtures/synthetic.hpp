#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rigour/core/random.hpp"
#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"
#include "rigour/criteria/registry.hpp"

namespace rigour::fixtures {

/// Neutral research vocabulary; words that occur in a criterion definition
/// are removed before use.
inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = [] {
    const std::vector<std::string> raw = {
        "corpus",    "token",      "layer",     "graph",     "image",      "speech",     "protein",   "sensor",
        "agent",     "policy",     "reward",    "vision",    "audio",      "parser",     "lexicon",   "encoder",
        "decoder",   "transformer", "kernel",   "matrix",    "tensor",     "gradient",   "epoch",     "batch",
        "dropout",   "attention",  "embedding", "cluster",   "annotation", "language",   "translation", "summary",
        "dialogue",  "question",   "answer",    "retrieval", "ranking",    "network",    "node",      "edge",
        "frame",     "pixel",      "voxel",     "patch",     "segment",    "scene",      "entity",    "relation",
        "event",     "sentence",   "word",      "phrase",    "character",  "grammar",    "syntax",    "discourse",
        "style",     "tone",       "genre",     "topic",     "module",     "pipeline",   "residual",  "convolution",
        "pooling",   "activation", "optimizer", "scheduler", "warmup",     "checkpoint", "inference", "latency",
        "throughput", "memory",    "storage",   "cache",     "shard",      "replica",    "sampler",   "decoding",
        "beam",      "prompt",     "adapter",   "distillation", "teacher", "student",    "curriculum", "augmentation",
        "contrastive", "triplet",  "margin",    "logit",     "softmax",    "temperature", "vocabulary", "subword",
        "morphology", "phoneme",   "prosody",   "spectrogram", "waveform", "camera",     "lidar",     "robot",
        "gripper",   "trajectory", "planner",   "simulator", "molecule",   "genome",     "cell",      "tissue",
        "patient",   "clinical",   "legal",     "financial", "news",       "social",     "tweet",     "review",
        "product",   "recommendation", "click", "session",   "user",       "item",       "catalog",   "query"};
    std::set<std::string> banned;
    for (const auto& c : criteria::default_registry().criteria()) {
      for (auto& w : text::words(c.name + " " + c.definition)) banned.insert(std::move(w));
    }
    std::vector<std::string> out;
    for (const auto& w : raw) {
      if (!banned.contains(w)) out.push_back(w);
    }
    return out;
  }();
  return words;
}

namespace detail {

inline std::string make_sentence(Rng& rng, const std::vector<std::string>& pool, std::size_t length) {
  std::string s;
  for (std::size_t k = 0; k < length; ++k) {
    if (k) s += ' ';
    s += pool[rng.below(pool.size())];
  }
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

inline std::string make_id(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%04zu", prefix, i);
  return buf;
}

/// First three sentences form the abstract, the rest the introduction.
inline Document assemble(std::string id, std::vector<std::string> sentences, std::optional<RigourLabel> label,
                         Rng& rng) {
  rng.shuffle(sentences);
  Document d;
  d.id = std::move(id);
  d.venue = "synthetic";
  d.year = 2024;
  d.label = label;
  d.state = DocumentState::Stripped;
  const std::size_t cut = std::min<std::size_t>(3, sentences.size());
  std::vector<std::string> a(sentences.begin(), sentences.begin() + static_cast<std::ptrdiff_t>(cut));
  std::vector<std::string> b(sentences.begin() + static_cast<std::ptrdiff_t>(cut), sentences.end());
  d.abstract = text::join(a, " ");
  d.introduction = text::join(b, " ");
  return d;
}

}  // namespace detail

inline const std::vector<std::string>& salience_criteria_names() {
  static const std::vector<std::string> names = {"Biases",     "Settings",       "Constraints", "Baselines",
                                                 "Benchmarks", "Generalisation", "Assumptions", "Reproducibility"};
  return names;
}

inline const std::vector<std::string>& planted_criteria_names() {
  static const std::vector<std::string> names = {"Baselines", "Benchmarks", "Reproducibility"};
  return names;
}

/// Eight criteria from the default registry, in default order.
inline criteria::CriteriaRegistry salience_registry() {
  return criteria::default_registry().subset(salience_criteria_names());
}

struct SalienceFixtureOptions {
  std::vector<std::string> planted = planted_criteria_names();
  std::size_t documents = 200;
  double four_star_share = 0.4;
  std::size_t filler_min = 4;
  std::size_t filler_max = 8;
  double background_rate = 0.5;
  double partial_rate = 0.3;
  std::uint64_t seed = 7;
};

/// Four-star documents quote the "Name: Definition" blocks of all planted
/// criteria. A share of the others (partial_rate) quote a random strict,
/// non-empty subset of those blocks, which keeps any strict subset of the
/// planted set from separating the classes. Both classes get the same
/// background (one block of a remaining criterion) and neutral filler.
inline Corpus salience_corpus(const SalienceFixtureOptions& opt = {}) {
  const auto registry = salience_registry();
  std::vector<std::string> blocks;
  for (const auto& c : registry.criteria()) blocks.push_back(c.name + ": " + c.definition);
  std::vector<std::size_t> planted_idx, other_idx;
  for (std::size_t i = 0; i < registry.size(); ++i) {
    const auto& names = opt.planted;
    const bool planted = std::find(names.begin(), names.end(), registry[i].name) != names.end();
    (planted ? planted_idx : other_idx).push_back(i);
  }
  const auto& filler = filler_words();

  Rng rng(opt.seed);
  const auto n_four = static_cast<std::size_t>(static_cast<double>(opt.documents) * opt.four_star_share + 0.5);
  std::vector<char> is_four(opt.documents, 0);
  std::fill(is_four.begin(), is_four.begin() + static_cast<std::ptrdiff_t>(n_four), 1);
  rng.shuffle(is_four);

  const std::size_t all = (std::size_t{1} << planted_idx.size()) - 1;
  std::vector<Document> docs;
  for (std::size_t i = 0; i < opt.documents; ++i) {
    std::vector<std::string> sentences;
    std::size_t kept = 0;
    if (is_four[i]) {
      kept = all;
    } else if (rng.bernoulli(opt.partial_rate)) {
      kept = 1 + rng.below(all - 1);
    }
    for (std::size_t k = 0; k < planted_idx.size(); ++k) {
      if ((kept >> k) & 1u) sentences.push_back(blocks[planted_idx[k]]);
    }
    if (rng.bernoulli(opt.background_rate)) sentences.push_back(blocks[other_idx[rng.below(other_idx.size())]]);
    const std::size_t n_filler = opt.filler_min + rng.below(opt.filler_max - opt.filler_min + 1);
    for (std::size_t k = 0; k < n_filler; ++k) sentences.push_back(detail::make_sentence(rng, filler, 10 + rng.below(5)));
    docs.push_back(detail::assemble(detail::make_id("sal", i + 1), std::move(sentences),
                                    is_four[i] ? RigourLabel::FourStar : RigourLabel::NonFourStar, rng));
  }
  return Corpus(std::move(docs));
}

struct SignalToken {
  std::string token;
  double p_four;
  double p_non;
};

/// "baseline" is the planted token; the rest are weaker cues in both
/// directions so that a bag-of-words classifier can separate the classes.
inline const std::vector<SignalToken>& keyword_signals() {
  static const std::vector<SignalToken> s = {
      {"baseline", 0.9, 0.1},    {"robust", 0.7, 0.3},    {"setting", 0.7, 0.3},    {"generalize", 0.7, 0.3},
      {"ablation", 0.7, 0.3},    {"rigorous", 0.7, 0.3},  {"survey", 0.3, 0.7},     {"anecdotal", 0.3, 0.7},
      {"preliminary", 0.3, 0.7}, {"informal", 0.3, 0.7}};
  return s;
}

struct KeywordFixtureOptions {
  std::size_t documents = 600;
  double four_star_share = 0.5;
  double filler_rate = 0.25;
  std::uint64_t seed = 11;
};

inline Corpus keyword_corpus(const KeywordFixtureOptions& opt = {}) {
  const auto& filler = filler_words();
  Rng rng(opt.seed);
  const auto n_four = static_cast<std::size_t>(static_cast<double>(opt.documents) * opt.four_star_share + 0.5);
  std::vector<char> is_four(opt.documents, 0);
  std::fill(is_four.begin(), is_four.begin() + static_cast<std::ptrdiff_t>(n_four), 1);
  rng.shuffle(is_four);

  std::vector<Document> docs;
  for (std::size_t i = 0; i < opt.documents; ++i) {
    std::vector<std::string> present;
    for (const auto& s : keyword_signals()) {
      if (rng.bernoulli(is_four[i] ? s.p_four : s.p_non)) present.push_back(s.token);
    }
    for (const auto& w : filler) {
      if (rng.bernoulli(opt.filler_rate)) present.push_back(w);
    }
    rng.shuffle(present);
    std::vector<std::string> sentences;
    for (std::size_t k = 0; k < present.size(); k += 8) {
      std::vector<std::string> chunk(present.begin() + static_cast<std::ptrdiff_t>(k),
                                     present.begin() + static_cast<std::ptrdiff_t>(std::min(present.size(), k + 8)));
      auto s = text::join(chunk, " ");
      s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      sentences.push_back(s + ".");
    }
    if (sentences.empty()) sentences.push_back("Empty.");
    docs.push_back(detail::assemble(detail::make_id("kw", i + 1), std::move(sentences),
                                    is_four[i] ? RigourLabel::FourStar : RigourLabel::NonFourStar, rng));
  }
  return Corpus(std::move(docs));
}

/// 988 labeled stubs, 292 of them 4*, for split checks.
inline Corpus ref_proportion_corpus(std::uint64_t seed = 3) {
  Rng rng(seed);
  std::vector<char> is_four(988, false);
  std::fill(is_four.begin(), is_four.begin() + 292, true);
  rng.shuffle(is_four);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < is_four.size(); ++i) {
    Document d;
    d.id = detail::make_id("ref", i + 1);
    d.venue = "REF";
    d.year = 2021;
    d.abstract = "Abstract of submission " + std::to_string(i + 1) + ".";
    d.introduction = "Introduction of submission " + std::to_string(i + 1) + ".";
    d.label = is_four[i] ? RigourLabel::FourStar : RigourLabel::NonFourStar;
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs));
}

}  // namespace rigour::fixtures
