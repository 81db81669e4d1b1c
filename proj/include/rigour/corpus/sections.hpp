#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rigour/core/error.hpp"
#include "rigour/core/files.hpp"
#include "rigour/core/text.hpp"

namespace rigour::corpus {

/// Heading regexes, each matched case-insensitively against a whole trimmed
/// line. A capture group 1 that matches text marks inline content following
/// the heading on the same line (e.g. "Abstract: We study ...").
struct HeadingPatterns {
  int version = 1;
  std::vector<std::string> abstract;
  std::vector<std::string> introduction;
  std::vector<std::string> section;

  static HeadingPatterns defaults() {
    HeadingPatterns p;
    p.abstract = {
        R"(abstract[\s.:]*)",
        R"(abstract\s*(?:[:.\-]|\xE2\x80\x94)\s*(\S.*))",
    };
    p.introduction = {
        R"(introduction[\s.:]*)",
        R"((?:\d{1,2}\.?|[ivxlc]{1,5}\.?)\s+introduction[\s.:]*)",
    };
    p.section = {
        R"((?:\d{1,2}\.?|[ivxlc]{1,5}\.)\s+[a-z][a-z0-9,:&/\-]*(?:\s+[a-z0-9,:&/\-]+){0,5})",
        R"((?:related work|background|preliminaries|methods?|methodology|approach|experiments?|results|discussion|conclusions?|references|acknowledge?ments|evaluation)[\s.:]*)",
    };
    return p;
  }

  static HeadingPatterns from_json(const nlohmann::json& j) {
    HeadingPatterns p;
    try {
      p.version = j.value("version", 1);
      p.abstract = j.at("abstract").get<std::vector<std::string>>();
      p.introduction = j.at("introduction").get<std::vector<std::string>>();
      p.section = j.at("section").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(std::string("heading patterns: ") + e.what());
    }
    return p;
  }

  static HeadingPatterns load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(files::read(path)));
    } catch (const nlohmann::json::parse_error& e) {
      throw SchemaError(path.string() + ": " + e.what());
    }
  }

  nlohmann::ordered_json to_json() const {
    return {{"version", version}, {"abstract", abstract}, {"introduction", introduction}, {"section", section}};
  }
};

struct Sections {
  std::string abstract;
  std::string introduction;
};

namespace detail {

struct HeadingMatcher {
  std::vector<std::regex> abstract;
  std::vector<std::regex> introduction;
  std::vector<std::regex> section;

  explicit HeadingMatcher(const HeadingPatterns& p) {
    auto compile = [](const std::vector<std::string>& src, std::vector<std::regex>& dst) {
      for (const auto& s : src) {
        try {
          dst.emplace_back(s, std::regex::ECMAScript | std::regex::icase);
        } catch (const std::regex_error& e) {
          throw SchemaError("bad heading pattern '" + s + "': " + e.what());
        }
      }
    };
    compile(p.abstract, abstract);
    compile(p.introduction, introduction);
    compile(p.section, section);
  }

  /// Returns true on a heading match; `inline_text` receives capture group 1.
  static bool match(const std::vector<std::regex>& patterns, std::string_view line, std::string* inline_text) {
    const std::string s(text::trim(line));
    if (s.empty()) return false;
    for (const auto& re : patterns) {
      std::smatch m;
      if (std::regex_match(s, m, re)) {
        if (inline_text) *inline_text = m.size() > 1 && m[1].matched ? m[1].str() : std::string();
        return true;
      }
    }
    return false;
  }
};

inline std::string join_span(const std::vector<std::string_view>& lines, std::size_t begin, std::size_t end,
                             const std::string& first) {
  std::string out = first;
  for (std::size_t i = begin; i < end; ++i) {
    if (!out.empty()) out.push_back('\n');
    out.append(lines[i]);
  }
  return std::string(text::trim(out));
}

}  // namespace detail

/// Abstract runs from its heading to the first introduction or numbered
/// heading; introduction runs from its heading to the next section heading.
inline Sections extract_sections(std::string_view raw_text,
                                 const HeadingPatterns& patterns = HeadingPatterns::defaults()) {
  if (text::trim(raw_text).empty()) throw SectionNotFound("abstract");
  const detail::HeadingMatcher m(patterns);
  const auto lines = text::split_lines(raw_text);
  const std::size_t n = lines.size();

  std::size_t abs_head = n;
  std::string abs_inline;
  for (std::size_t i = 0; i < n; ++i) {
    if (detail::HeadingMatcher::match(m.abstract, lines[i], &abs_inline)) {
      abs_head = i;
      break;
    }
  }
  if (abs_head == n) throw SectionNotFound("abstract");

  std::size_t intro_head = n;
  std::size_t abs_end = n;
  for (std::size_t i = abs_head + 1; i < n; ++i) {
    if (detail::HeadingMatcher::match(m.introduction, lines[i], nullptr)) {
      intro_head = i;
      if (abs_end == n) abs_end = i;
      break;
    }
    if (abs_end == n && detail::HeadingMatcher::match(m.section, lines[i], nullptr)) abs_end = i;
  }
  if (intro_head == n) throw SectionNotFound("introduction");

  std::size_t intro_end = n;
  for (std::size_t i = intro_head + 1; i < n; ++i) {
    if (detail::HeadingMatcher::match(m.section, lines[i], nullptr) ||
        detail::HeadingMatcher::match(m.abstract, lines[i], nullptr)) {
      intro_end = i;
      break;
    }
  }

  Sections s;
  s.abstract = detail::join_span(lines, abs_head + 1, abs_end, abs_inline);
  s.introduction = detail::join_span(lines, intro_head + 1, intro_end, "");
  if (s.abstract.empty()) throw SectionNotFound("abstract");
  if (s.introduction.empty()) throw SectionNotFound("introduction");
  return s;
}

}  // namespace rigour::corpus
