#pragma once

#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"
#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::corpus {

/// Line patterns for author, affiliation, venue, header and footer residue.
/// A line is dropped when any pattern is found in it (case-insensitive search).
struct MetadataPatterns {
  struct Entry {
    std::string kind;
    std::string regex;
  };
  int version = 1;
  std::vector<Entry> entries;

  static MetadataPatterns defaults() {
    MetadataPatterns p;
    p.entries = {
        {"venue", R"(^\s*(proceedings of|in proceedings|published as a conference paper|accepted (at|to|for)\b|under review|workshop track))"},
        {"venue", R"(^\s*arxiv:\s*\S+)"},
        {"header", R"(^\s*(preprint|camera[- ]ready|submitted to)\b[^.]{0,80}$)"},
        {"footer", R"(copyright|\xC2\xA9|all rights reserved|permission to make digital or hard copies)"},
        {"footer", R"(^\s*(page\s*)?\d{1,4}\s*$)"},
        {"author", R"([\w.+\-]+@[\w\-]+\.[\w.\-]+)"},
        {"author", R"(^\s*[*†‡]?\s*(equal contribution|corresponding author))"},
        {"affiliation", R"(^[^.]{0,100}\b(university|institute|college|laborator(y|ies)|department of|school of|research lab)\b[^.]{0,100}$)"},
    };
    return p;
  }

  static MetadataPatterns from_json(const nlohmann::json& j) {
    MetadataPatterns p;
    try {
      p.version = j.value("version", 1);
      for (const auto& e : j.at("patterns")) {
        p.entries.push_back({e.at("kind").get<std::string>(), e.at("regex").get<std::string>()});
      }
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("metadata patterns: ") + e.what());
    }
    return p;
  }

  static MetadataPatterns load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(files::read(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path.string() + ": " + e.what());
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& e : entries) arr.push_back({{"kind", e.kind}, {"regex", e.regex}});
    return {{"version", version}, {"patterns", arr}};
  }
};

class MetadataStripper {
 public:
  explicit MetadataStripper(const MetadataPatterns& patterns = MetadataPatterns::defaults()) {
    for (const auto& e : patterns.entries) {
      try {
        compiled_.emplace_back(e.regex, std::regex::ECMAScript | std::regex::icase);
      } catch (const std::regex_error& err) {
        throw SchemaError("bad metadata pattern '" + e.regex + "': " + err.what());
      }
    }
  }

  bool is_metadata(std::string_view line) const {
    const std::string s(line);
    for (const auto& re : compiled_) {
      if (std::regex_search(s, re)) return true;
    }
    return false;
  }

  std::string strip_text(std::string_view text) const {
    std::string out;
    bool first = true;
    for (auto line : text::split_lines(text)) {
      if (is_metadata(line)) continue;
      if (!first) out.push_back('\n');
      out.append(line);
      first = false;
    }
    return out;
  }

  /// Raw or already stripped input; the result is always Stripped.
  Document operator()(Document doc) const {
    if (doc.state == DocumentState::Masked) {
      throw InvalidState("document " + doc.id + " is already masked");
    }
    doc.abstract = strip_text(doc.abstract);
    doc.introduction = strip_text(doc.introduction);
    doc.advance(DocumentState::Stripped);
    return doc;
  }

 private:
  std::vector<std::regex> compiled_;
};

inline Document strip_metadata(Document doc, const MetadataPatterns& patterns = MetadataPatterns::defaults()) {
  return MetadataStripper(patterns)(std::move(doc));
}

/// Escape hatch for corpora whose metadata was removed upstream.
inline Document mark_stripped(Document doc) {
  doc.advance(DocumentState::Stripped);
  return doc;
}

}  // namespace rigour::corpus
