#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rigour/app.hpp"
#include "rigour/fixtures/synthetic.hpp"

namespace fs = std::filesystem;
using namespace rigour;

namespace {

struct Globals {
  std::string config;
  std::string cache_dir;
  bool mock = false;
};

app::Config base_config(const Globals& g) {
  app::Config c = g.config.empty() ? app::Config{} : app::load_config(g.config);
  if (!g.cache_dir.empty()) c.cache_dir = fs::path(g.cache_dir);
  return c;
}

std::array<double, 3> parse_ratios(const std::string& s) {
  std::array<double, 3> r{};
  std::stringstream ss(s);
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i == 3) throw ConfigError("--split takes three comma-separated ratios");
    r[i++] = std::stod(part);
  }
  if (i != 3) throw ConfigError("--split takes three comma-separated ratios");
  return r;
}

void print_manifest(const app::RunManifest& m) {
  for (const auto& s : m.stages) std::printf("%-10s %s\n", s.name.c_str(), s.status.c_str());
}

nlohmann::ordered_json fixture_config() {
  nlohmann::ordered_json c;
  c["seed"] = 7;
  c["out_dir"] = "../../runs/fixture";
  c["ingest"] = {{"input", "salience_corpus.jsonl"}};
  c["mask"] = {{"k", 10}};
  c["keywords"] = {{"min_df", 5}, {"percentile", 10}, {"top_k", 100}};
  c["define"] = {{"registry", "registry8.json"}, {"from_keywords", 0}};
  c["embed"] = {{"provider", "mock"}, {"dim", 256}, {"seed", 0}};
  c["chat"] = {{"provider", "mock"}};
  c["salience"] = {{"mode", "appended"}, {"top", 20}, {"alpha", 1e-4}};
  c["sentences"] = {{"threshold", 0.5}};
  c["certainty"] = {{"provider", "mock"}};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Rigour criteria extraction and assessment pipeline"};
  cli.require_subcommand(1);
  Globals g;
  cli.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  cli.add_option("--cache-dir", g.cache_dir, "directory for the embedding and definition caches");
  cli.add_flag("--mock-providers", g.mock, "use deterministic mock providers for embeddings, chat and certainty");
  cli.fallthrough();

  // ingest
  auto* ingest = cli.add_subcommand("ingest", "read a corpus JSONL or a directory of raw text files");
  std::string in_input, in_out = "corpus.jsonl", in_headings, in_meta, in_preds, in_split;
  std::uint64_t in_seed = 7;
  bool in_no_strip = false;
  ingest->add_option("--input", in_input, "JSONL file or directory")->required();
  ingest->add_option("--out", in_out, "output corpus JSONL");
  ingest->add_option("--headings", in_headings, "heading pattern JSON");
  ingest->add_option("--metadata-patterns", in_meta, "metadata pattern JSON");
  ingest->add_option("--predictions", in_preds, "label predictions JSONL for unlabeled documents");
  ingest->add_option("--split", in_split, "train,val,test ratios");
  ingest->add_option("--seed", in_seed, "split seed");
  ingest->add_flag("--no-strip", in_no_strip, "input is already free of metadata");

  // mask
  auto* mask = cli.add_subcommand("mask", "replace topic keywords with [MASK]");
  std::string mk_corpus, mk_out = "masked.jsonl", mk_audit = "mask_keywords.csv";
  std::size_t mk_k = mask::kDefaultKeywordsPerDocument;
  bool mk_per_corpus = false;
  mask->add_option("--corpus", mk_corpus)->required();
  mask->add_option("--out", mk_out);
  mask->add_option("--audit", mk_audit, "keyword audit CSV");
  mask->add_option("--k", mk_k, "keywords per document");
  mask->add_flag("--per-corpus", mk_per_corpus, "one keyword list for the whole corpus");

  // keywords
  auto* keywords = cli.add_subcommand("keywords", "mutual information selection and logistic regression");
  std::string kw_corpus, kw_out = "keywords.csv", kw_preds = "predictions.jsonl", kw_info = "classifier.json",
                         kw_allow;
  features::KeywordAnalysisOptions kw_opt;
  keywords->add_option("--corpus", kw_corpus)->required();
  keywords->add_option("--out", kw_out, "keywords CSV");
  keywords->add_option("--predictions-out", kw_preds);
  keywords->add_option("--classifier-out", kw_info);
  keywords->add_option("--percentile", kw_opt.percentile);
  keywords->add_option("--top-k", kw_opt.top_k);
  keywords->add_option("--min-df", kw_opt.min_df);
  keywords->add_option("--allowlist", kw_allow);

  // define
  auto* define = cli.add_subcommand("define", "generate criterion definitions with a chat model");
  std::vector<std::string> df_keywords;
  std::string df_from, df_registry, df_out = "registry.json", df_review, df_approved;
  std::size_t df_count = 10;
  define->add_option("--keywords", df_keywords, "keywords to define")->delimiter(',');
  define->add_option("--from-keywords", df_from, "keywords CSV; its top positive tokens are defined");
  define->add_option("--count", df_count, "how many keywords to take from --from-keywords");
  define->add_option("--registry", df_registry, "base registry (default: shipped criteria)");
  define->add_option("--out", df_out);
  define->add_option("--review", df_review, "write definitions here for approval instead of adding them");
  define->add_option("--approved", df_approved, "reviewed definitions to add");

  // embed
  auto* embed_cmd = cli.add_subcommand("embed", "embed documents (no instruction)");
  std::string em_corpus, em_out = "doc_embeddings.jsonl";
  embed_cmd->add_option("--corpus", em_corpus)->required();
  embed_cmd->add_option("--out", em_out);

  // salience
  auto* sal = cli.add_subcommand("salience", "search criteria sets by Kendall tau");
  std::string sa_corpus, sa_registry, sa_embeddings, sa_preds, sa_out = ".", sa_mode = "appended";
  std::vector<std::string> sa_criteria;
  std::size_t sa_top = salience::kDefaultTopM;
  double sa_alpha = salience::kDefaultAlpha;
  bool sa_greedy = false;
  sal->add_option("--corpus", sa_corpus)->required();
  sal->add_option("--registry", sa_registry)->required();
  sal->add_option("--embeddings", sa_embeddings, "document embeddings JSONL (computed when absent)");
  sal->add_option("--predictions", sa_preds, "label predictions for unlabeled documents");
  sal->add_option("--criteria", sa_criteria, "restrict the registry")->delimiter(',');
  sal->add_option("--mode", sa_mode, "appended | summed");
  sal->add_option("--top", sa_top);
  sal->add_option("--alpha", sa_alpha);
  sal->add_flag("--greedy", sa_greedy, "forward selection instead of full enumeration");
  sal->add_option("--out-dir", sa_out);

  // sentences
  auto* sen = cli.add_subcommand("sentences", "label sentences with their closest criterion");
  std::string se_corpus, se_registry, se_best, se_preds, se_out = "sentence_labels.csv";
  double se_threshold = certainty::kDefaultThreshold;
  sen->add_option("--corpus", se_corpus)->required();
  sen->add_option("--registry", se_registry)->required();
  sen->add_option("--best-set", se_best, "restrict to the criteria of a best-set report");
  sen->add_option("--predictions", se_preds);
  sen->add_option("--threshold", se_threshold);
  sen->add_option("--out", se_out);

  // certainty
  auto* cer = cli.add_subcommand("certainty", "aggregate certainty predictions per criterion");
  std::string ce_corpus, ce_labels, ce_registry, ce_certainty, ce_preds, ce_out = ".";
  std::vector<std::string> ce_intersection;
  cer->add_option("--corpus", ce_corpus)->required();
  cer->add_option("--labels", ce_labels, "sentence labels CSV")->required();
  cer->add_option("--registry", ce_registry, "registry giving the row order")->required();
  cer->add_option("--certainty-predictions", ce_certainty, "certainty predictions JSONL");
  cer->add_option("--predictions", ce_preds, "label predictions for unlabeled documents");
  cer->add_option("--criteria-intersection", ce_intersection, "run directories whose criteria are intersected")
      ->expected(2, 16);
  cer->add_option("--out-dir", ce_out);

  // report
  auto* rep = cli.add_subcommand("report", "write report files for a run directory");
  std::string rp_dir;
  rep->add_option("--run-dir", rp_dir)->required();

  // run
  auto* run = cli.add_subcommand("run", "run the configured pipeline");
  std::vector<std::string> rn_stages;
  std::string rn_out;
  bool rn_fresh = false;
  run->add_option("--stages", rn_stages, "stages to run (dependencies are added)")->delimiter(',');
  run->add_option("--out-dir", rn_out, "overrides out_dir");
  run->add_flag("--no-resume", rn_fresh, "re-execute every stage");

  // fixture
  auto* fix = cli.add_subcommand("fixture", "write the synthetic fixtures");
  std::string fx_out = "data/fixtures";
  fix->add_option("--out-dir", fx_out);

  CLI11_PARSE(cli, argc, argv);

  try {
    auto cfg = base_config(g);
    app::Layout l = app::Layout::under(".");

    if (*ingest) {
      cfg.ingest.input = fs::path(in_input);
      if (!in_headings.empty()) cfg.ingest.headings = fs::path(in_headings);
      if (!in_meta.empty()) cfg.ingest.metadata_patterns = fs::path(in_meta);
      if (!in_preds.empty()) cfg.ingest.predictions = fs::path(in_preds);
      if (!in_split.empty()) cfg.ingest.split = parse_ratios(in_split);
      cfg.ingest.strip = !in_no_strip;
      cfg.seed = in_seed;
      l.corpus = in_out;
      app::run_ingest(cfg, l);
      std::printf("wrote %s\n", in_out.c_str());
    } else if (*mask) {
      cfg.mask.k = mk_k;
      cfg.mask.per_corpus = mk_per_corpus;
      l.corpus = mk_corpus;
      l.masked = mk_out;
      l.mask_audit = mk_audit;
      app::Providers p(cfg, g.mock);
      app::run_mask(cfg, p, l);
      std::printf("wrote %s and %s\n", mk_out.c_str(), mk_audit.c_str());
    } else if (*keywords) {
      cfg.keywords.percentile = kw_opt.percentile;
      cfg.keywords.top_k = kw_opt.top_k;
      cfg.keywords.min_df = kw_opt.min_df;
      if (!kw_allow.empty()) cfg.keywords.allowlist = fs::path(kw_allow);
      l.masked = kw_corpus;
      l.keywords = kw_out;
      l.predictions = kw_preds;
      l.classifier = kw_info;
      app::run_keywords(cfg, l);
      std::printf("wrote %s, %s and %s\n", kw_out.c_str(), kw_preds.c_str(), kw_info.c_str());
    } else if (*define) {
      cfg.define.keywords = df_keywords;
      if (!df_from.empty()) {
        cfg.define.from_keywords = df_count;
        l.keywords = df_from;
      }
      if (!df_registry.empty()) cfg.define.registry = fs::path(df_registry);
      if (!df_review.empty()) {
        cfg.define.review = true;
        l.review = df_review;
      }
      if (!df_approved.empty()) {
        cfg.define.review = true;
        cfg.define.approved = fs::path(df_approved);
      }
      l.registry = df_out;
      app::Providers p(cfg, g.mock);
      app::run_define(cfg, p, l);
      std::printf("wrote %s\n", df_out.c_str());
    } else if (*embed_cmd) {
      l.corpus = em_corpus;
      l.embeddings = em_out;
      app::Providers p(cfg, g.mock);
      app::run_embed(p, l);
      std::printf("wrote %s\n", em_out.c_str());
    } else if (*sal) {
      cfg.salience.mode = salience::parse_mode(sa_mode);
      cfg.salience.top = sa_top;
      cfg.salience.alpha = sa_alpha;
      cfg.salience.greedy = sa_greedy;
      if (!sa_criteria.empty()) cfg.salience.criteria = sa_criteria;
      l = app::Layout::under(sa_out);
      l.corpus = sa_corpus;
      l.registry = sa_registry;
      l.predictions = sa_preds.empty() ? l.dir / "predictions.jsonl" : fs::path(sa_preds);
      app::Providers p(cfg, g.mock);
      if (sa_embeddings.empty()) {
        app::run_embed(p, l);
      } else {
        l.embeddings = sa_embeddings;
      }
      app::run_salience(cfg, p, l);
      std::printf("wrote %s, %s and %s\n", l.salience.c_str(), l.evaluated.c_str(), l.best_set.c_str());
    } else if (*sen) {
      cfg.sentences.threshold = se_threshold;
      cfg.sentences.best_set_only = !se_best.empty();
      l.corpus = se_corpus;
      l.registry = se_registry;
      if (!se_best.empty()) l.best_set = se_best;
      if (!se_preds.empty()) l.predictions = se_preds;
      l.sentence_labels = se_out;
      app::Providers p(cfg, g.mock);
      app::run_sentences(cfg, p, l);
      std::printf("wrote %s\n", se_out.c_str());
    } else if (*cer) {
      if (!ce_certainty.empty()) {
        cfg.certainty.provider = "jsonl";
        cfg.certainty.predictions = fs::path(ce_certainty);
      }
      cfg.certainty.intersection.assign(ce_intersection.begin(), ce_intersection.end());
      l = app::Layout::under(ce_out);
      l.corpus = ce_corpus;
      l.sentence_labels = ce_labels;
      l.registry = ce_registry;
      if (!ce_preds.empty()) l.predictions = ce_preds;
      app::Providers p(cfg, g.mock);
      app::run_certainty(cfg, p, l);
      std::printf("wrote certainty grids to %s\n", l.dir.c_str());
    } else if (*rep) {
      const auto l2 = app::Layout::under(rp_dir);
      auto m = app::load_manifest(l2.manifest);
      if (!m) throw MissingStageOutput(l2.manifest.generic_string());
      for (const auto& f : app::emit_reports(*m, l2)) std::printf("wrote %s\n", f.c_str());
    } else if (*run) {
      if (g.config.empty()) throw ConfigError("run needs --config");
      if (!rn_stages.empty()) cfg.stages = rn_stages;
      if (!rn_out.empty()) cfg.out_dir = rn_out;
      app::RunOptions opt;
      opt.force_mock = g.mock;
      opt.resume = !rn_fresh;
      print_manifest(app::run_pipeline(cfg, opt));
      std::printf("manifest: %s\n", app::Layout::under(cfg.out_dir).manifest.c_str());
    } else if (*fix) {
      const fs::path out(fx_out);
      corpus::write_corpus(fixtures::salience_corpus(), out / "salience_corpus.jsonl");
      criteria::save_registry(fixtures::salience_registry(), out / "registry8.json");
      corpus::write_corpus(fixtures::keyword_corpus(), out / "keyword_corpus.jsonl");
      files::write(out / "config.json", fixture_config().dump(2) + "\n");
      std::printf("wrote fixtures to %s\n", out.c_str());
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
