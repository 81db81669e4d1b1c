#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"
#include "rigour/corpus/sections.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::corpus {

namespace detail {

inline std::string required_string(const nlohmann::json& rec, const char* name, std::size_t line) {
  auto it = rec.find(name);
  if (it == rec.end() || it->is_null()) throw MissingRequiredField(name);
  if (!it->is_string()) throw MalformedRecord(line, std::string(name) + " must be a string");
  return it->get<std::string>();
}

inline Document parse_record(const nlohmann::json& rec, std::size_t line, std::optional<std::string>& split) {
  if (!rec.is_object()) throw MalformedRecord(line, "record is not an object");
  Document d;
  d.id = required_string(rec, "id", line);
  if (d.id.empty()) throw MalformedRecord(line, "id is empty");
  d.abstract = required_string(rec, "abstract", line);
  d.introduction = required_string(rec, "introduction", line);

  if (auto it = rec.find("label"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedRecord(line, "label must be a string or null");
    auto l = parse_label(it->get<std::string>());
    if (!l) throw MalformedRecord(line, "label must be \"4*\" or \"non-4*\"");
    d.label = *l;
  }
  if (auto it = rec.find("venue"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedRecord(line, "venue must be a string or null");
    d.venue = it->get<std::string>();
  }
  if (auto it = rec.find("year"); it != rec.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw MalformedRecord(line, "year must be an integer or null");
    d.year = it->get<std::int64_t>();
  }
  if (auto it = rec.find("state"); it != rec.end() && !it->is_null()) {
    auto s = it->is_string() ? parse_state(it->get<std::string>()) : std::nullopt;
    if (!s) throw MalformedRecord(line, "state must be raw, stripped or masked");
    d.state = *s;
  }
  if (auto it = rec.find("split"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) throw MalformedRecord(line, "split must be a string");
    split = it->get<std::string>();
  }
  return d;
}

}  // namespace detail

/// Parses corpus JSONL text. Blank lines are skipped; line numbers are 1-based.
inline Corpus parse_corpus_jsonl(std::string_view content) {
  std::vector<Document> docs;
  Corpus::Splits splits;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
    ++line_no;
    if (text::trim(line).empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw MalformedRecord(line_no, e.what());
    }
    std::optional<std::string> split;
    auto doc = detail::parse_record(rec, line_no, split);
    if (!ids.insert(doc.id).second) throw DuplicateId(doc.id);
    if (split) splits[*split].push_back(doc.id);
    docs.push_back(std::move(doc));
  }
  return Corpus(std::move(docs), std::move(splits));
}

inline Corpus ingest_corpus(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) {
    throw std::runtime_error("corpus file not found: " + path.string());
  }
  return parse_corpus_jsonl(files::read(path));
}

inline nlohmann::ordered_json to_json(const Document& d, const std::optional<std::string>& split = std::nullopt) {
  nlohmann::ordered_json j;
  j["id"] = d.id;
  j["abstract"] = d.abstract;
  j["introduction"] = d.introduction;
  j["label"] = d.label ? nlohmann::ordered_json(std::string(to_string(*d.label))) : nlohmann::ordered_json(nullptr);
  j["venue"] = d.venue ? nlohmann::ordered_json(*d.venue) : nlohmann::ordered_json(nullptr);
  j["year"] = d.year ? nlohmann::ordered_json(*d.year) : nlohmann::ordered_json(nullptr);
  if (d.state != DocumentState::Raw) j["state"] = std::string(to_string(d.state));
  if (split) j["split"] = *split;
  return j;
}

/// One record per line, fixed key order; "state" and "split" appear only when set.
inline std::string serialize_corpus(const Corpus& corpus) {
  std::unordered_map<std::string, std::string> split_of;
  for (const auto& [name, ids] : corpus.splits()) {
    for (const auto& id : ids) split_of[id] = name;
  }
  std::string out;
  for (const auto& d : corpus.documents()) {
    std::optional<std::string> split;
    if (auto it = split_of.find(d.id); it != split_of.end()) split = it->second;
    out += to_json(d, split).dump();
    out += '\n';
  }
  return out;
}

inline void write_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  files::write(path, serialize_corpus(corpus));
}

/// One UTF-8 text file per paper, id = filename stem, files read in name order.
/// Abstract and introduction are located with the heading patterns.
inline Corpus ingest_raw_directory(const std::filesystem::path& dir,
                                   const HeadingPatterns& patterns = HeadingPatterns::defaults()) {
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file()) paths.push_back(e.path());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Document> docs;
  for (const auto& p : paths) {
    Document d;
    d.id = p.stem().string();
    try {
      auto s = extract_sections(files::read(p), patterns);
      d.abstract = std::move(s.abstract);
      d.introduction = std::move(s.introduction);
    } catch (const SectionNotFound& e) {
      throw SectionNotFound(e.which() + " (in " + p.filename().string() + ")");
    }
    docs.push_back(std::move(d));
  }
  return Corpus(std::move(docs));
}

}  // namespace rigour::corpus
