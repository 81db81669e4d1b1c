#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "rigour/certainty/types.hpp"
#include "rigour/core/digest.hpp"
#include "rigour/core/files.hpp"
#include "rigour/core/http.hpp"
#include "rigour/core/parallel.hpp"
#include "rigour/core/text.hpp"

namespace rigour::certainty {

/// Twelve-cell certainty probabilities for each sentence.
class CertaintyProvider {
 public:
  virtual ~CertaintyProvider() = default;
  virtual std::string id() const = 0;
  virtual std::vector<CertaintyPrediction> predict(std::span<const Sentence> sentences) = 0;
};

inline nlohmann::ordered_json to_json(const CertaintyPrediction& p) {
  nlohmann::ordered_json j;
  j["doc_id"] = p.doc_id;
  j["index"] = p.index;
  nlohmann::ordered_json probs;
  for (std::size_t c = 0; c < kCells; ++c) probs[cell_keys()[c]] = p.probs[c];
  j["probs"] = std::move(probs);
  return j;
}

inline CertaintyPrediction prediction_from_json(const nlohmann::json& j) {
  CertaintyPrediction p;
  try {
    p.doc_id = j.at("doc_id").get<std::string>();
    p.index = j.at("index").get<std::size_t>();
    const auto& probs = j.at("probs");
    for (std::size_t c = 0; c < kCells; ++c) p.probs[c] = probs.at(cell_keys()[c]).get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("certainty prediction: ") + e.what());
  }
  p.validate();
  return p;
}

inline std::vector<CertaintyPrediction> parse_predictions(std::string_view content) {
  std::vector<CertaintyPrediction> out;
  std::size_t line_no = 0;
  for (auto line : text::split_lines(content)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(prediction_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, e.what());
    } catch (const SchemaError& e) {
      throw MalformedRecord(line_no, e.what());
    }
  }
  return out;
}

inline std::string serialize_predictions(std::span<const CertaintyPrediction> preds) {
  std::string out;
  for (const auto& p : preds) out += to_json(p).dump() + "\n";
  return out;
}

/// Predictions produced elsewhere and stored as JSONL.
class JsonlCertaintyProvider final : public CertaintyProvider {
 public:
  explicit JsonlCertaintyProvider(const std::filesystem::path& path) : path_(path.string()) {
    for (auto& p : parse_predictions(files::read(path))) {
      const auto k = p.key();
      by_key_.insert_or_assign(k, std::move(p));
    }
  }

  std::string id() const override { return "jsonl/" + path_; }

  std::vector<CertaintyPrediction> predict(std::span<const Sentence> sentences) override {
    std::vector<CertaintyPrediction> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
      auto it = by_key_.find(s.key());
      if (it == by_key_.end()) throw MissingPrediction(s.key());
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::string path_;
  std::unordered_map<std::string, CertaintyPrediction> by_key_;
};

struct HttpCertaintyOptions {
  std::string base_url;  ///< "/certainty" is appended
  std::string model;
  std::optional<std::string> api_key;
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  http::RetryPolicy retry;
};

/// POST {"model", "sentences": [{"doc_id", "index", "text"}]}
/// -> {"predictions": [{"doc_id", "index", "probs": {12 cells}}]}
class HttpCertaintyProvider final : public CertaintyProvider {
 public:
  explicit HttpCertaintyProvider(HttpCertaintyOptions options)
      : opt_(std::move(options)), endpoint_(http::Endpoint::parse(opt_.base_url)) {
    if (opt_.batch_size == 0) opt_.batch_size = 1;
  }

  std::string id() const override { return "http/" + opt_.model; }

  std::vector<CertaintyPrediction> predict(std::span<const Sentence> sentences) override {
    std::vector<CertaintyPrediction> out(sentences.size());
    const std::size_t batches = (sentences.size() + opt_.batch_size - 1) / opt_.batch_size;
    parallel_for(batches, opt_.max_in_flight, [&](std::size_t b) {
      const std::size_t lo = b * opt_.batch_size, hi = std::min(sentences.size(), lo + opt_.batch_size);
      nlohmann::json body;
      body["model"] = opt_.model;
      body["sentences"] = nlohmann::json::array();
      for (std::size_t i = lo; i < hi; ++i) {
        body["sentences"].push_back({{"doc_id", sentences[i].doc_id}, {"index", sentences[i].index},
                                     {"text", sentences[i].text}});
      }
      const auto reply = http::post_json(endpoint_, "/certainty", body, opt_.api_key, opt_.retry);
      if (!reply.contains("predictions") || !reply["predictions"].is_array() ||
          reply["predictions"].size() != hi - lo) {
        throw ProviderError("certainty reply must hold one prediction per sentence");
      }
      for (std::size_t i = lo; i < hi; ++i) {
        auto p = prediction_from_json(reply["predictions"][i - lo]);
        if (p.key() != sentences[i].key()) throw ProviderError("certainty reply out of order at " + sentences[i].key());
        out[i] = std::move(p);
      }
    });
    return out;
  }

 private:
  HttpCertaintyOptions opt_;
  http::Endpoint endpoint_;
};

/// Deterministic stand-in: hedge words raise the uncertain cells, booster
/// words the certain ones, and a per-sentence hash adds small variation.
class MockCertaintyProvider final : public CertaintyProvider {
 public:
  std::string id() const override { return "mock-certainty"; }

  std::vector<CertaintyPrediction> predict(std::span<const Sentence> sentences) override {
    std::vector<CertaintyPrediction> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(score(s));
    return out;
  }

  static CertaintyPrediction score(const Sentence& s) {
    static const std::unordered_map<std::string, int> cues = {
        {"may", -1},         {"might", -1},     {"could", -1},     {"possibly", -1},   {"perhaps", -1},
        {"likely", -1},      {"suggest", -1},   {"suggests", -1},  {"appear", -1},     {"appears", -1},
        {"approximately", -1}, {"roughly", -1}, {"potentially", -1}, {"clearly", 1},   {"demonstrate", 1},
        {"demonstrates", 1}, {"show", 1},       {"shows", 1},      {"consistently", 1}, {"always", 1},
        {"significantly", 1}, {"prove", 1},     {"proves", 1},     {"outperforms", 1}, {"establish", 1}};
    int balance = 0;
    for (const auto& w : text::words(s.text)) {
      auto it = cues.find(w);
      if (it != cues.end()) balance += it->second;
    }
    const double lean = std::clamp(static_cast<double>(balance) * 0.15, -0.35, 0.35);
    CertaintyPrediction p;
    p.doc_id = s.doc_id;
    p.index = s.index;
    const std::uint64_t h = digest::fnv1a(s.text);
    for (auto a : kAspects) {
      const auto shift = static_cast<double>((h >> (static_cast<unsigned>(a) * 8)) & 0xff) / 255.0 * 0.2 - 0.1;
      p.probs[cell_index(a, Polarity::Certain)] = std::clamp(0.5 + lean + shift, 0.0, 1.0);
      p.probs[cell_index(a, Polarity::Uncertain)] = std::clamp(0.5 - lean - shift, 0.0, 1.0);
    }
    return p;
  }
};

}  // namespace rigour::certainty
