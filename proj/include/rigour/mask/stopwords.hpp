#pragma once

#include <string_view>
#include <unordered_set>

namespace rigour::mask {

/// English function words excluded from keyword candidates.
inline const std::unordered_set<std::string_view>& stopwords() {
  static const std::unordered_set<std::string_view> kWords = {
      "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any", "are", "as",
      "at", "be", "because", "been", "before", "being", "below", "between", "both", "but", "by", "can",
      "cannot", "could", "did", "do", "does", "doing", "down", "during", "each", "either", "etc", "few", "for",
      "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself", "him",
      "himself", "his", "how", "however", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "may",
      "me", "might", "more", "most", "much", "must", "my", "myself", "neither", "no", "nor", "not", "now", "of",
      "off", "on", "once", "one", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own",
      "per", "same", "several", "she", "should", "since", "so", "some", "such", "than", "that", "the", "their",
      "theirs", "them", "themselves", "then", "there", "therefore", "these", "they", "this", "those",
      "through", "thus", "to", "too", "two", "under", "until", "up", "upon", "us", "use", "used", "using",
      "very", "via", "was", "we", "were", "what", "when", "where", "whether", "which", "while", "who", "whom",
      "why", "will", "with", "within", "without", "would", "yet", "you", "your", "yours", "yourself",
  };
  return kWords;
}

inline bool is_stopword(std::string_view w) { return stopwords().contains(w); }

}  // namespace rigour::mask
