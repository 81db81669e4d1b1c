#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace rigour::text {

inline constexpr std::string_view kMaskToken = "[MASK]";

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
inline bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
inline bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
inline bool is_upper(char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; }
inline char to_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), to_lower);
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (to_lower(a[i]) != to_lower(b[i])) return false;
  }
  return true;
}

inline bool iends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

inline std::vector<std::string_view> split_lines(std::string_view s) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(s.substr(start));
      break;
    }
    lines.push_back(s.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

/// Collapses every whitespace run to one space and trims the ends.
inline std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

/// A word span inside a source string. `mask` marks a literal "[MASK]".
struct WordSpan {
  std::size_t begin;
  std::size_t end;
  bool mask = false;
};

/// Alphanumeric runs plus "[MASK]" placeholders, in order of appearance.
/// Characters inside a mask placeholder never form words of their own.
inline std::vector<WordSpan> word_spans(std::string_view s) {
  std::vector<WordSpan> spans;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s.compare(i, kMaskToken.size(), kMaskToken) == 0) {
      spans.push_back({i, i + kMaskToken.size(), true});
      i += kMaskToken.size();
      continue;
    }
    if (is_alnum(s[i])) {
      std::size_t j = i;
      while (j < s.size() && is_alnum(s[j])) ++j;
      spans.push_back({i, j, false});
      i = j;
      continue;
    }
    ++i;
  }
  return spans;
}

/// Lowercased alphanumeric words of length >= min_len; mask placeholders skipped.
inline std::vector<std::string> words(std::string_view s, std::size_t min_len = 1) {
  std::vector<std::string> out;
  for (const auto& w : word_spans(s)) {
    if (w.mask || w.end - w.begin < min_len) continue;
    out.push_back(lower(s.substr(w.begin, w.end - w.begin)));
  }
  return out;
}

}  // namespace rigour::text
