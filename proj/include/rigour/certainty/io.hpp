#pragma once

#include <span>
#include <string>

#include "rigour/certainty/types.hpp"
#include "rigour/core/format.hpp"

namespace rigour::certainty {

/// Criterion x aspect grid of diffs for one polarity; "NA" marks a cell
/// without sentences from both classes.
inline std::string breakdown_csv(const CertaintyBreakdown& b, Polarity polarity, int digits = 2) {
  std::string out = "criterion";
  for (auto a : kAspects) out += "," + std::string(to_string(a));
  out += "\n";
  for (const auto& c : b.criteria) {
    out += fmt::csv_field(c.criterion);
    for (auto a : kAspects) {
      const auto& cell = c.cells[cell_index(a, polarity)];
      out += "," + (cell.diff ? fmt::fixed(*cell.diff, digits) : std::string("NA"));
    }
    out += "\n";
  }
  return out;
}

inline std::string counts_csv(const CertaintyBreakdown& b) {
  std::string out = "criterion,n_four_star,n_non_four_star,total\n";
  for (const auto& c : b.criteria) {
    out += fmt::csv_field(c.criterion) + "," + std::to_string(c.n_four) + "," + std::to_string(c.n_non) + "," +
           std::to_string(c.n_four + c.n_non) + "\n";
  }
  return out;
}

inline std::string sentence_labels_csv(std::span<const SentenceLabel> labels) {
  std::string out = "doc_id,index,criterion,similarity,doc_label\n";
  for (const auto& l : labels) {
    out += fmt::csv_field(l.sentence.doc_id) + "," + std::to_string(l.sentence.index) + "," +
           fmt::csv_field(l.criterion) + "," + fmt::shortest(l.similarity) + "," +
           fmt::csv_field(to_string(l.doc_label)) + "\n";
  }
  return out;
}

}  // namespace rigour::certainty
