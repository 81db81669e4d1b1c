#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::corpus {

/// Bump when the list below changes; segmentation output depends on it.
inline constexpr int kAbbreviationListVersion = 1;

inline constexpr std::array<std::string_view, 32> kAbbreviations = {
    "e.g.", "i.e.", "et al.", "cf.",   "vs.",   "viz.", "w.r.t.", "approx.",
    "resp.", "Fig.", "Figs.", "Eq.",   "Eqs.",  "Sec.", "Secs.",  "Tab.",
    "Ref.",  "Refs.", "Alg.", "Thm.",  "Def.",  "Prop.", "Lem.",  "Ch.",
    "Vol.",  "No.",   "pp.",  "Dr.",   "Prof.", "Mr.",  "Mrs.",   "Ms.",
};

namespace detail {

inline bool ends_with_abbreviation(std::string_view upto) {
  for (auto abbr : kAbbreviations) {
    if (!text::iends_with(upto, abbr)) continue;
    const std::size_t start = upto.size() - abbr.size();
    if (start == 0 || !text::is_alpha(upto[start - 1])) return true;
  }
  return false;
}

inline bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
inline bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }

}  // namespace detail

/// Splits at '.', '?' or '!' followed by whitespace and an uppercase letter
/// (optionally behind an opening quote or bracket),
/// unless the period closes a listed abbreviation. Sentences are trimmed.
inline std::vector<Sentence> segment_sentences(std::string_view text, std::string_view doc_id = {}) {
  std::vector<Sentence> out;
  auto emit = [&](std::string_view piece) {
    auto t = text::trim(piece);
    if (!t.empty()) out.push_back({std::string(doc_id), out.size(), std::string(t)});
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c != '.' && c != '?' && c != '!') continue;
    std::size_t j = i + 1;
    while (j < text.size() && detail::is_closer(text[j])) ++j;
    if (j >= text.size() || !text::is_space(text[j])) continue;
    std::size_t k = j;
    while (k < text.size() && text::is_space(text[k])) ++k;
    std::size_t u = k;
    while (u < text.size() && detail::is_opener(text[u])) ++u;
    if (u >= text.size() || !text::is_upper(text[u])) continue;
    if (c == '.' && detail::ends_with_abbreviation(text.substr(0, i + 1))) continue;
    emit(text.substr(start, j - start));
    start = k;
    i = k - 1;
  }
  emit(text.substr(start));
  return out;
}

}  // namespace rigour::corpus
