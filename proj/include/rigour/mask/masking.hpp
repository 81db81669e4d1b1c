#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "rigour/core/text.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::mask {

struct MaskStats {
  /// Occurrences replaced per keyword surface, in application order.
  std::vector<std::pair<std::string, std::size_t>> occurrences;

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : occurrences) n += c;
    return n;
  }
};

namespace detail {

/// Replaces whole-word, case-insensitive occurrences of one keyword. Words of
/// a multi-word keyword may be separated by any whitespace run in the text.
inline std::string mask_one(const std::string& src, const std::vector<std::string>& kw, std::size_t& count) {
  const auto spans = text::word_spans(src);
  const std::size_t m = kw.size();
  std::string out;
  out.reserve(src.size());
  std::size_t copied = 0;
  std::size_t i = 0;
  while (i + m <= spans.size()) {
    bool hit = true;
    for (std::size_t k = 0; k < m && hit; ++k) {
      const auto& s = spans[i + k];
      hit = !s.mask && text::iequals(std::string_view(src).substr(s.begin, s.end - s.begin), kw[k]);
      if (hit && k > 0) {
        for (std::size_t c = spans[i + k - 1].end; c < s.begin && hit; ++c) hit = text::is_space(src[c]);
      }
    }
    if (!hit) {
      ++i;
      continue;
    }
    out.append(src, copied, spans[i].begin - copied);
    out.append(text::kMaskToken);
    copied = spans[i + m - 1].end;
    ++count;
    i += m;
  }
  out.append(src, copied, std::string::npos);
  return out;
}

}  // namespace detail

/// Masks every keyword surface in `text`, longest keywords (by word count,
/// then characters) first so shorter ones never split a longer match.
inline std::string mask_text(const std::string& text, std::vector<std::string> surfaces, MaskStats* stats = nullptr) {
  std::vector<std::pair<std::vector<std::string>, std::string>> kws;
  for (auto& s : surfaces) {
    auto w = text::words(s);
    if (w.empty()) continue;
    kws.emplace_back(std::move(w), std::move(s));
  }
  std::sort(kws.begin(), kws.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
    if (a.second.size() != b.second.size()) return a.second.size() > b.second.size();
    return a.second < b.second;
  });
  std::string cur = text;
  for (const auto& [words, surface] : kws) {
    std::size_t n = 0;
    cur = detail::mask_one(cur, words, n);
    if (stats) stats->occurrences.emplace_back(surface, n);
  }
  return cur;
}

}  // namespace rigour::mask
