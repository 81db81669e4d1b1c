#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/app/config.hpp"
#include "rigour/app/providers.hpp"
#include "rigour/certainty.hpp"
#include "rigour/core/format.hpp"
#include "rigour/corpus.hpp"
#include "rigour/criteria.hpp"
#include "rigour/embed.hpp"
#include "rigour/features.hpp"
#include "rigour/mask.hpp"
#include "rigour/salience.hpp"

namespace rigour::app {

/// Artifact locations of one run. Every path defaults to a fixed name under
/// the run directory; single-stage CLI verbs override individual entries.
struct Layout {
  fs::path dir;
  fs::path corpus, masked, mask_audit;
  fs::path keywords, predictions, classifier;
  fs::path registry, review;
  fs::path embeddings;
  fs::path salience, evaluated, best_set;
  fs::path sentence_labels;
  fs::path certainty_predictions, certainty_certain, certainty_uncertain, certainty_counts;
  fs::path reports;
  fs::path manifest;

  static Layout under(const fs::path& dir) {
    Layout l;
    l.dir = dir;
    l.corpus = dir / "corpus.jsonl";
    l.masked = dir / "masked.jsonl";
    l.mask_audit = dir / "mask_keywords.csv";
    l.keywords = dir / "keywords.csv";
    l.predictions = dir / "predictions.jsonl";
    l.classifier = dir / "classifier.json";
    l.registry = dir / "registry.json";
    l.review = dir / "definitions_review.json";
    l.embeddings = dir / "doc_embeddings.jsonl";
    l.salience = dir / "salience.csv";
    l.evaluated = dir / "salience_evaluated.csv";
    l.best_set = dir / "best_set.json";
    l.sentence_labels = dir / "sentence_labels.csv";
    l.certainty_predictions = dir / "certainty_predictions.jsonl";
    l.certainty_certain = dir / "certainty_certain.csv";
    l.certainty_uncertain = dir / "certainty_uncertain.csv";
    l.certainty_counts = dir / "certainty_counts.csv";
    l.reports = dir / "reports";
    l.manifest = dir / "manifest.json";
    return l;
  }
};

// ---------------------------------------------------------------------------
// shared readers

inline Corpus read_corpus(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingStageOutput(p.generic_string());
  return corpus::ingest_corpus(p);
}

/// Corpus with every label present, falling back to classifier predictions
/// for unlabeled documents.
inline Corpus labeled_corpus(const Layout& l) {
  auto c = read_corpus(l.corpus);
  if (c.fully_labeled()) return c;
  if (!fs::is_regular_file(l.predictions)) throw MissingRequiredField("label (no predictions for unlabeled documents)");
  return features::apply_predictions(c, features::load_predictions(l.predictions));
}

inline std::string embeddings_jsonl(const std::vector<std::string>& ids, std::span<const embed::EmbeddingVector> v) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = ids[i];
    j["dim"] = v[i].dim();
    j["values"] = std::vector<double>(v[i].values().begin(), v[i].values().end());
    out += j.dump() + "\n";
  }
  return out;
}

inline std::map<std::string, embed::EmbeddingVector> read_embeddings(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingStageOutput(p.generic_string());
  std::map<std::string, embed::EmbeddingVector> out;
  std::size_t line = 0;
  for (auto row : text::split_lines(files::read(p))) {
    ++line;
    if (text::trim(row).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(row);
      auto values = j.at("values").get<std::vector<double>>();
      if (values.size() != j.at("dim").get<std::size_t>()) throw MalformedRecord(line, "dim does not match values");
      out.insert_or_assign(j.at("id").get<std::string>(), embed::EmbeddingVector(std::move(values)));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line, e.what());
    }
  }
  return out;
}

/// Sentence labels written by the sentences stage, with sentence text
/// recovered by re-segmenting the corpus.
inline std::vector<certainty::SentenceLabel> read_sentence_labels(const fs::path& p, const Corpus& corpus) {
  if (!fs::is_regular_file(p)) throw MissingStageOutput(p.generic_string());
  const auto rows = fmt::parse_csv(files::read(p));
  if (rows.empty() || rows[0] != std::vector<std::string>{"doc_id", "index", "criterion", "similarity", "doc_label"}) {
    throw SchemaError("unexpected sentence label header in " + p.generic_string());
  }
  std::map<std::string, std::vector<Sentence>> by_doc;
  std::vector<certainty::SentenceLabel> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 5) throw MalformedRecord(r + 1, "expected 5 fields");
    auto it = by_doc.find(row[0]);
    if (it == by_doc.end()) {
      const auto& d = corpus.at(row[0]);
      it = by_doc.emplace(row[0], corpus::segment_sentences(d.text(), d.id)).first;
    }
    const auto index = static_cast<std::size_t>(std::stoull(row[1]));
    if (index >= it->second.size()) throw MalformedRecord(r + 1, "sentence index out of range");
    const auto label = parse_label(row[4]);
    if (!label) throw MalformedRecord(r + 1, "unknown label " + row[4]);
    out.push_back({it->second[index], row[2], std::stod(row[3]), *label});
  }
  return out;
}

inline std::vector<std::string> criteria_column(const fs::path& sentence_labels) {
  if (!fs::is_regular_file(sentence_labels)) throw MissingStageOutput(sentence_labels.generic_string());
  const auto rows = fmt::parse_csv(files::read(sentence_labels));
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() > 2 && seen.insert(rows[r][2]).second) out.push_back(rows[r][2]);
  }
  return out;
}

inline criteria::CriteriaRegistry read_registry(const fs::path& p) {
  if (!fs::is_regular_file(p)) throw MissingStageOutput(p.generic_string());
  return criteria::load_registry(p);
}

// ---------------------------------------------------------------------------
// stages

inline void run_ingest(const Config& cfg, const Layout& l) {
  if (!cfg.ingest.input) throw ConfigError("ingest.input is not set");
  const auto& in = *cfg.ingest.input;
  Corpus c;
  if (fs::is_directory(in)) {
    const auto headings =
        cfg.ingest.headings ? corpus::HeadingPatterns::load(*cfg.ingest.headings) : corpus::HeadingPatterns::defaults();
    c = corpus::ingest_raw_directory(in, headings);
  } else {
    c = corpus::ingest_corpus(in);
  }
  const auto patterns = cfg.ingest.metadata_patterns ? corpus::MetadataPatterns::load(*cfg.ingest.metadata_patterns)
                                                     : corpus::MetadataPatterns::defaults();
  const corpus::MetadataStripper stripper(patterns);
  std::vector<Document> docs;
  for (const auto& d : c.documents()) {
    if (d.state != DocumentState::Raw) {
      docs.push_back(d);
    } else {
      docs.push_back(cfg.ingest.strip ? stripper(d) : corpus::mark_stripped(d));
    }
  }
  c = Corpus(std::move(docs), c.splits());
  if (cfg.ingest.predictions) c = features::apply_predictions(c, features::load_predictions(*cfg.ingest.predictions));
  if (cfg.ingest.split) c = corpus::split_corpus(c, *cfg.ingest.split, cfg.seed);
  corpus::write_corpus(c, l.corpus);
}

inline void run_mask(const Config& cfg, Providers& p, const Layout& l) {
  const auto c = read_corpus(l.corpus);
  auto& embedder = p.embedder();
  std::vector<std::vector<mask::TopicKeyword>> per_doc(c.size());
  std::string audit = "doc_id,keyword,score\n";
  if (cfg.mask.per_corpus) {
    const auto shared = mask::extract_corpus_keywords(c, embedder, cfg.mask.k);
    for (auto& v : per_doc) v = shared;
    for (const auto& k : shared) audit += "*," + fmt::csv_field(k.surface) + "," + fmt::shortest(k.score) + "\n";
  } else {
    const auto& docs = c.documents();
    parallel_for(docs.size(), default_concurrency(), [&](std::size_t i) {
      per_doc[i] = mask::extract_topic_keywords(docs[i], embedder, cfg.mask.k);
    });
    for (std::size_t i = 0; i < docs.size(); ++i) {
      for (const auto& k : per_doc[i]) {
        audit += fmt::csv_field(docs[i].id) + "," + fmt::csv_field(k.surface) + "," + fmt::shortest(k.score) + "\n";
      }
    }
  }
  std::vector<Document> masked;
  for (std::size_t i = 0; i < c.size(); ++i) masked.push_back(mask::mask_document(c.documents()[i], per_doc[i]));
  corpus::write_corpus(Corpus(std::move(masked), c.splits()), l.masked);
  files::write(l.mask_audit, audit);
}

inline void run_keywords(const Config& cfg, const Layout& l) {
  const auto c = read_corpus(l.masked);
  features::KeywordAnalysisOptions opt;
  opt.min_df = cfg.keywords.min_df;
  opt.percentile = cfg.keywords.percentile;
  opt.top_k = cfg.keywords.top_k;
  opt.logistic.l2_lambda = cfg.keywords.l2_lambda;
  opt.logistic.tol = cfg.keywords.tol;
  opt.logistic.max_iters = cfg.keywords.max_iters;

  // Train on the labeled part of the train split when there is one.
  const bool has_split = c.splits().contains(std::string(kTrainSplit));
  std::vector<std::string> texts, eval_texts;
  std::vector<RigourLabel> labels, eval_labels;
  for (const auto& d : c.documents()) {
    if (!d.label) continue;
    const auto split = c.split_of(d.id);
    if (!has_split || split == kTrainSplit) {
      texts.push_back(d.text());
      labels.push_back(*d.label);
    } else if (split == kTestSplit) {
      eval_texts.push_back(d.text());
      eval_labels.push_back(*d.label);
    }
  }
  if (texts.empty()) throw MissingRequiredField("label (no labeled training documents)");
  const auto a = features::analyze_keywords(texts, labels, opt);
  auto ranked = a.keywords;
  if (cfg.keywords.allowlist) ranked = features::filter_allowlist(ranked, features::parse_allowlist(files::read(*cfg.keywords.allowlist)));
  files::write(l.keywords, features::keywords_csv(ranked));
  files::write(l.predictions, features::serialize_predictions(features::predict_corpus(a.model, c)));

  nlohmann::ordered_json info;
  info["train_documents"] = texts.size();
  info["vocabulary"] = a.matrix.vocabulary.size();
  info["selected_features"] = a.selected.size();
  info["iterations"] = a.model.training_meta.iterations;
  info["converged"] = a.model.training_meta.converged;
  info["final_loss"] = a.model.training_meta.final_loss;
  const bool held_out = !eval_texts.empty();
  if (!held_out) {
    eval_texts = texts;
    eval_labels = labels;
  }
  const auto m = features::align_to(features::build_feature_matrix(eval_texts, true, 1), a.model.vocabulary);
  const auto metrics = features::evaluate_classifier(a.model, m, eval_labels);
  info["evaluation"] = held_out ? "test split" : "training documents";
  info["evaluation_documents"] = eval_texts.size();
  info["accuracy"] = metrics.accuracy;
  info["precision"] = metrics.precision_undefined ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(metrics.precision);
  info["recall"] = metrics.recall_undefined ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(metrics.recall);
  info["f1"] = metrics.f1_undefined ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(metrics.f1);
  info["confusion"] = {{"tp", metrics.tp}, {"fp", metrics.fp}, {"fn", metrics.fn}, {"tn", metrics.tn}};
  files::write(l.classifier, info.dump(2) + "\n");
}

/// Keywords named in the config plus the top positive ones from the
/// keywords stage, minus names already in the base registry.
inline std::vector<std::string> keywords_to_define(const Config& cfg, const Layout& l,
                                                   const criteria::CriteriaRegistry& base) {
  std::vector<std::string> out;
  auto add = [&](const std::string& k) {
    for (const auto& c : base.criteria()) {
      if (text::iequals(c.name, k)) return;
    }
    for (const auto& o : out) {
      if (text::iequals(o, k)) return;
    }
    out.push_back(k);
  };
  for (const auto& k : cfg.define.keywords) add(k);
  if (cfg.define.from_keywords > 0) {
    if (!fs::is_regular_file(l.keywords)) throw MissingStageOutput(l.keywords.generic_string());
    const auto rows = fmt::parse_csv(files::read(l.keywords));
    std::size_t taken = 0;
    for (std::size_t r = 1; r < rows.size() && taken < cfg.define.from_keywords; ++r) {
      if (rows[r].size() == 4 && rows[r][3] == to_string(RigourLabel::FourStar)) {
        add(rows[r][0]);
        ++taken;
      }
    }
  }
  return out;
}

inline void run_define(const Config& cfg, Providers& p, const Layout& l) {
  const auto base = cfg.define.registry ? criteria::load_registry(*cfg.define.registry) : criteria::default_registry();
  const auto wanted = keywords_to_define(cfg, l, base);
  std::vector<criteria::Criterion> generated;
  if (!wanted.empty()) {
    criteria::DefinitionGenerator gen(p.chat(), p.definition_cache(), cfg.define.max_in_flight);
    generated = gen.generate_all(wanted);
  }
  if (cfg.define.review) {
    files::write(l.review, criteria::review_document(generated).dump(2) + "\n");
    std::vector<criteria::Criterion> approved;
    if (cfg.define.approved) approved = criteria::approved_criteria(nlohmann::json::parse(files::read(*cfg.define.approved)));
    criteria::save_registry(criteria::extend_registry(base, approved), l.registry);
  } else {
    criteria::save_registry(criteria::extend_registry(base, generated), l.registry);
  }
}

inline void run_embed(Providers& p, const Layout& l) {
  const auto c = read_corpus(l.corpus);
  const auto v = salience::embed_corpus(c, p.embedder());
  std::vector<std::string> ids;
  for (const auto& d : c.documents()) ids.push_back(d.id);
  files::write(l.embeddings, embeddings_jsonl(ids, v));
}

inline criteria::CriteriaRegistry salience_registry(const Config& cfg, const Layout& l) {
  auto r = read_registry(l.registry);
  return cfg.salience.criteria.empty() ? r : r.subset(cfg.salience.criteria);
}

inline void run_salience(const Config& cfg, Providers& p, const Layout& l) {
  const auto c = labeled_corpus(l);
  const auto registry = salience_registry(cfg, l);
  const auto stored = read_embeddings(l.embeddings);
  std::vector<embed::EmbeddingVector> docs;
  std::vector<std::string> ids;
  for (const auto& d : c.documents()) {
    auto it = stored.find(d.id);
    if (it == stored.end()) throw MissingStageOutput("embedding for document " + d.id);
    docs.push_back(it->second);
    ids.push_back(d.id);
  }
  salience::SearchOptions opt;
  opt.mode = cfg.salience.mode;
  opt.top_m = cfg.salience.top;
  opt.alpha = cfg.salience.alpha;
  opt.require_significance = cfg.salience.require_significance;
  opt.greedy = cfg.salience.greedy;
  const auto labels = c.labels();
  const auto report = salience::search_salient_sets(labels, docs, registry, p.embedder(), opt);
  if (report.ranked.empty()) throw Error("no criteria set reaches p < " + fmt::shortest(opt.alpha));
  files::write(l.salience, salience::salience_csv(report.ranked, registry));
  files::write(l.evaluated, salience::evaluated_csv(report.evaluated, registry, opt.mode));
  files::write(l.best_set, salience::best_set_json(report.ranked.front(), registry, ids, labels).dump(2) + "\n");
}

inline void run_sentences(const Config& cfg, Providers& p, const Layout& l) {
  const auto c = labeled_corpus(l);
  auto registry = read_registry(l.registry);
  if (cfg.sentences.best_set_only) {
    if (!fs::is_regular_file(l.best_set)) throw MissingStageOutput(l.best_set.generic_string());
    registry = registry.subset(salience::best_set_criteria(nlohmann::json::parse(files::read(l.best_set))));
  } else if (!cfg.salience.criteria.empty()) {
    registry = registry.subset(cfg.salience.criteria);
  }
  const auto sentences = certainty::corpus_sentences(c);
  const auto labels = certainty::label_sentences(sentences, c, registry, p.embedder(), cfg.sentences.threshold);
  files::write(l.sentence_labels, certainty::sentence_labels_csv(labels));
}

inline void run_certainty(const Config& cfg, Providers& p, const Layout& l) {
  const auto c = labeled_corpus(l);
  auto labels = read_sentence_labels(l.sentence_labels, c);
  std::vector<std::string> order = read_registry(l.registry).names();
  if (!cfg.certainty.intersection.empty()) {
    std::vector<std::vector<std::string>> lists;
    for (const auto& run : cfg.certainty.intersection) lists.push_back(criteria_column(Layout::under(run).sentence_labels));
    const auto keep = certainty::intersect_criteria(lists);
    labels = certainty::restrict_to(labels, keep);
  }
  std::vector<Sentence> sentences;
  for (const auto& s : labels) sentences.push_back(s.sentence);
  const auto predictions = p.certainty().predict(sentences);
  const auto breakdown = certainty::aggregate_certainty(labels, predictions, order);
  files::write(l.certainty_predictions, certainty::serialize_predictions(predictions));
  files::write(l.certainty_certain, certainty::breakdown_csv(breakdown, certainty::Polarity::Certain));
  files::write(l.certainty_uncertain, certainty::breakdown_csv(breakdown, certainty::Polarity::Uncertain));
  files::write(l.certainty_counts, certainty::counts_csv(breakdown));
}

}  // namespace rigour::app
