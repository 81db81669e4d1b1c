#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"
#include "rigour/core/format.hpp"
#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"
#include "rigour/features/ranking.hpp"

namespace rigour::features {

struct Prediction {
  std::string id;
  RigourLabel label = RigourLabel::NonFourStar;
  double score = 0.0;
  bool operator==(const Prediction&) const = default;
};

inline std::string serialize_predictions(const std::vector<Prediction>& preds) {
  std::string out;
  for (const auto& p : preds) {
    nlohmann::ordered_json j;
    j["id"] = p.id;
    j["label"] = std::string(to_string(p.label));
    j["score"] = p.score;
    out += j.dump() + "\n";
  }
  return out;
}

inline std::vector<Prediction> parse_predictions(std::string_view content) {
  std::vector<Prediction> out;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Prediction p;
      p.id = j.at("id").get<std::string>();
      const auto label = parse_label(j.at("label").get<std::string>());
      if (!label) throw MalformedRecord(line_no, "unknown label");
      p.label = *label;
      p.score = j.value("score", p.label == RigourLabel::FourStar ? 1.0 : 0.0);
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    } catch (const Error& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return out;
}

inline std::vector<Prediction> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(files::read(path));
}

/// Fills missing labels from predictions; existing labels win unless
/// `overwrite`. Every unlabeled document must have a prediction.
inline Corpus apply_predictions(const Corpus& corpus, const std::vector<Prediction>& preds, bool overwrite = false) {
  std::map<std::string, RigourLabel> by_id;
  for (const auto& p : preds) by_id[p.id] = p.label;
  auto docs = corpus.documents();
  for (auto& d : docs) {
    if (d.label && !overwrite) continue;
    auto it = by_id.find(d.id);
    if (it == by_id.end()) {
      if (d.label) continue;
      throw MissingPrediction(d.id);
    }
    d.label = it->second;
  }
  return Corpus(std::move(docs), corpus.splits());
}

inline std::vector<Prediction> predict_corpus(const ClassifierModel& model, const Corpus& corpus) {
  std::vector<std::string> texts;
  for (const auto& d : corpus.documents()) texts.push_back(d.text());
  // min_df 1 so rare model tokens are not dropped before alignment.
  std::vector<Prediction> out;
  FeatureMatrix raw;
  try {
    raw = build_feature_matrix(texts, true, 1);
  } catch (const EmptyVocabulary&) {
    raw.rows.resize(texts.size());
    raw.binarized = true;
  }
  const auto m = align_to(raw, model.vocabulary);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    const double p = model.probability(m.rows[i]);
    out.push_back({corpus.documents()[i].id, p >= 0.5 ? RigourLabel::FourStar : RigourLabel::NonFourStar, p});
  }
  return out;
}

inline std::string keywords_csv(const RankedKeywords& ranked) {
  std::string out = "token,mi_score,coefficient,class\n";
  const auto emit = [&](const std::vector<KeywordFeature>& v) {
    for (const auto& k : v) {
      out += fmt::csv_field(k.token) + "," + fmt::shortest(k.mi_score) + "," + fmt::shortest(k.coefficient) + "," +
             fmt::csv_field(to_string(k.label_class)) + "\n";
    }
  };
  emit(ranked.positive);
  emit(ranked.negative);
  return out;
}

/// One token per line; blank lines and '#' comments ignored.
inline std::set<std::string> parse_allowlist(std::string_view content) {
  std::set<std::string> out;
  for (auto line : text::split_lines(content)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.insert(text::lower(t));
  }
  return out;
}

}  // namespace rigour::features
