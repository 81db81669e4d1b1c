#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "rigour/app/config.hpp"
#include "rigour/app/manifest.hpp"
#include "rigour/app/providers.hpp"
#include "rigour/app/reports.hpp"
#include "rigour/app/stages.hpp"

namespace rigour::app {

struct StageDef {
  std::string name;
  std::vector<std::string> deps;
  std::vector<std::string> sections;  ///< config sections that feed the signature
  std::function<std::vector<fs::path>(const Config&, const Layout&)> inputs;
  std::function<std::vector<fs::path>(const Config&, const Layout&)> outputs;
  std::function<std::vector<std::string>(const Config&, Providers&)> providers;
  std::function<void(const Config&, Providers&, const Layout&, const RunManifest&)> run;
};

namespace detail {

inline void push_if(std::vector<fs::path>& v, const std::optional<fs::path>& p) {
  if (p) v.push_back(*p);
}

inline void push_if_exists(std::vector<fs::path>& v, const fs::path& p) {
  if (fs::exists(p)) v.push_back(p);
}

inline std::vector<std::string> none(const Config&, Providers&) { return {}; }
inline std::vector<std::string> embed_only(const Config&, Providers& p) { return {p.embed_id()}; }

}  // namespace detail

/// The pipeline in dependency order.
inline const std::vector<StageDef>& stage_table() {
  using detail::push_if;
  using detail::push_if_exists;
  static const std::vector<StageDef> table = {
      {"ingest", {}, {"seed", "ingest"},
       [](const Config& c, const Layout&) {
         std::vector<fs::path> v;
         push_if(v, c.ingest.input);
         push_if(v, c.ingest.headings);
         push_if(v, c.ingest.metadata_patterns);
         push_if(v, c.ingest.predictions);
         return v;
       },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.corpus}; }, detail::none,
       [](const Config& c, Providers&, const Layout& l, const RunManifest&) { run_ingest(c, l); }},

      {"mask", {"ingest"}, {"mask", "embed"},
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.corpus}; },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.masked, l.mask_audit}; }, detail::embed_only,
       [](const Config& c, Providers& p, const Layout& l, const RunManifest&) { run_mask(c, p, l); }},

      {"keywords", {"mask"}, {"keywords"},
       [](const Config& c, const Layout& l) {
         std::vector<fs::path> v{l.masked};
         push_if(v, c.keywords.allowlist);
         return v;
       },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.keywords, l.predictions, l.classifier}; },
       detail::none, [](const Config& c, Providers&, const Layout& l, const RunManifest&) { run_keywords(c, l); }},

      {"define", {"keywords"}, {"define", "chat"},
       [](const Config& c, const Layout& l) {
         std::vector<fs::path> v;
         push_if(v, c.define.registry);
         push_if(v, c.define.approved);
         if (c.define.from_keywords > 0) v.push_back(l.keywords);
         return v;
       },
       [](const Config& c, const Layout& l) {
         std::vector<fs::path> v{l.registry};
         if (c.define.review) v.push_back(l.review);
         return v;
       },
       [](const Config&, Providers& p) { return std::vector<std::string>{p.chat_id()}; },
       [](const Config& c, Providers& p, const Layout& l, const RunManifest&) { run_define(c, p, l); }},

      {"embed", {"ingest"}, {"embed"},
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.corpus}; },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.embeddings}; }, detail::embed_only,
       [](const Config&, Providers& p, const Layout& l, const RunManifest&) { run_embed(p, l); }},

      {"salience", {"embed", "define"}, {"salience", "embed"},
       [](const Config&, const Layout& l) {
         std::vector<fs::path> v{l.corpus, l.embeddings, l.registry};
         push_if_exists(v, l.predictions);
         return v;
       },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.salience, l.evaluated, l.best_set}; },
       detail::embed_only,
       [](const Config& c, Providers& p, const Layout& l, const RunManifest&) { run_salience(c, p, l); }},

      {"sentences", {"salience"}, {"sentences", "salience", "embed"},
       [](const Config& c, const Layout& l) {
         std::vector<fs::path> v{l.corpus, l.registry};
         if (c.sentences.best_set_only) v.push_back(l.best_set);
         push_if_exists(v, l.predictions);
         return v;
       },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.sentence_labels}; }, detail::embed_only,
       [](const Config& c, Providers& p, const Layout& l, const RunManifest&) { run_sentences(c, p, l); }},

      {"certainty", {"sentences"}, {"certainty"},
       [](const Config& c, const Layout& l) {
         std::vector<fs::path> v{l.corpus, l.registry, l.sentence_labels};
         push_if_exists(v, l.predictions);
         push_if(v, c.certainty.predictions);
         for (const auto& run : c.certainty.intersection) v.push_back(Layout::under(run).sentence_labels);
         return v;
       },
       [](const Config&, const Layout& l) {
         return std::vector<fs::path>{l.certainty_predictions, l.certainty_certain, l.certainty_uncertain,
                                      l.certainty_counts};
       },
       [](const Config&, Providers& p) { return std::vector<std::string>{p.certainty_id()}; },
       [](const Config& c, Providers& p, const Layout& l, const RunManifest&) { run_certainty(c, p, l); }},

      {"report", {}, {"salience"},
       [](const Config&, const Layout& l) {
         std::vector<fs::path> v;
         for (const auto& p : {l.keywords, l.classifier, l.registry, l.salience, l.best_set, l.certainty_certain,
                               l.certainty_uncertain, l.certainty_counts}) {
           push_if_exists(v, p);
         }
         return v;
       },
       [](const Config&, const Layout& l) { return std::vector<fs::path>{l.reports}; }, detail::none,
       [](const Config&, Providers&, const Layout& l, const RunManifest& m) { emit_reports(m, l); }},
  };
  return table;
}

inline const StageDef& stage(std::string_view name) {
  for (const auto& s : stage_table()) {
    if (s.name == name) return s;
  }
  throw ConfigError("unknown stage '" + std::string(name) + "'");
}

/// Requested stages plus everything they depend on, in pipeline order.
inline std::vector<std::string> schedule(const std::vector<std::string>& requested) {
  std::set<std::string> need;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    if (!need.insert(n).second) return;
    for (const auto& d : stage(n).deps) visit(d);
  };
  for (const auto& r : requested) visit(r);
  std::vector<std::string> out;
  for (const auto& s : stage_table()) {
    if (need.contains(s.name)) out.push_back(s.name);
  }
  return out;
}

/// Paths inside the run directory are recorded relative to it.
inline std::string manifest_path(const fs::path& p, const Layout& l) {
  const auto rel = p.lexically_relative(l.dir);
  if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  return p.generic_string();
}

inline DigestMap digests(const std::vector<fs::path>& paths, const Layout& l) {
  DigestMap out;
  for (const auto& p : paths) {
    if (!fs::exists(p)) throw MissingStageOutput(p.generic_string());
    out[manifest_path(p, l)] = path_digest(p);
  }
  return out;
}

inline std::string stage_signature(const StageDef& s, const nlohmann::ordered_json& config, const DigestMap& inputs,
                                   const std::vector<std::string>& providers) {
  digest::Sha256 h;
  h.field(s.name);
  for (const auto& sec : s.sections) h.field(sec).field(config.contains(sec) ? config[sec].dump() : "null");
  for (const auto& [k, v] : inputs) h.field(k).field(v);
  for (const auto& p : providers) h.field(p);
  return h.hex();
}

struct RunOptions {
  bool force_mock = false;
  bool resume = true;
  Environment env;
};

/// Runs the requested stages and their dependencies. A stage whose
/// signature (config sections, input digests, provider ids) matches the
/// previous manifest and whose outputs are unchanged is not re-executed.
inline RunManifest run_pipeline(const Config& cfg, Providers& providers, bool resume = true) {
  const auto layout = Layout::under(cfg.out_dir);
  fs::create_directories(layout.dir);
  ManifestWriter writer(layout.manifest);
  const auto previous = load_manifest(layout.manifest);

  RunManifest m;
  m.config = to_json(cfg);
  const auto order = schedule(cfg.stages);
  if (previous) {
    for (const auto& s : previous->stages) {
      if (std::find(order.begin(), order.end(), s.name) == order.end()) m.stages.push_back(s);
    }
  }
  m.providers["embed"] = providers.embed_id();
  m.providers["chat"] = providers.chat_id();
  m.providers["certainty"] = providers.certainty_id();

  for (const auto& name : order) {
    const auto& def = stage(name);
    StageRecord rec;
    rec.name = name;
    rec.started_at = utc_timestamp();
    try {
      rec.providers = def.providers(cfg, providers);
      rec.inputs = digests(def.inputs(cfg, layout), layout);
      rec.signature = stage_signature(def, m.config, rec.inputs, rec.providers);
      const StageRecord* prev = previous ? previous->find(name) : nullptr;
      bool reuse = resume && prev && prev->status != "failed" && prev->signature == rec.signature && name != "report";
      if (reuse) {
        for (const auto& p : def.outputs(cfg, layout)) {
          const auto key = manifest_path(p, layout);
          auto it = prev->outputs.find(key);
          if (!fs::exists(p) || it == prev->outputs.end() || path_digest(p) != it->second) reuse = false;
        }
      }
      if (reuse) {
        rec.status = "cached";
        rec.outputs = prev->outputs;
      } else {
        def.run(cfg, providers, layout, m);
        rec.status = "completed";
        rec.outputs = digests(def.outputs(cfg, layout), layout);
      }
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.error = e.what();
      rec.finished_at = utc_timestamp();
      std::erase_if(m.stages, [&](const StageRecord& s) { return s.name == name; });
      m.stages.push_back(rec);
      writer.write(m);
      throw StageError(name, e.what());
    }
    rec.finished_at = utc_timestamp();
    std::erase_if(m.stages, [&](const StageRecord& s) { return s.name == name; });
    m.stages.push_back(std::move(rec));
    writer.write(m);
  }
  // Keep pipeline order in the file regardless of which stages ran.
  std::vector<StageRecord> sorted;
  for (const auto& s : stage_table()) {
    if (const auto* r = m.find(s.name)) sorted.push_back(*r);
  }
  m.stages = std::move(sorted);
  writer.write(m);
  return m;
}

inline RunManifest run_pipeline(const Config& cfg, const RunOptions& opt = {}) {
  Providers providers(cfg, opt.force_mock, opt.env);
  return run_pipeline(cfg, providers, opt.resume);
}

}  // namespace rigour::app
