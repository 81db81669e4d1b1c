#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/corpus/types.hpp"

namespace rigour::certainty {

enum class Aspect { Framing, Suggestion, Extent, Condition, Probability, Number };
enum class Polarity { Certain, Uncertain };

inline constexpr std::array<Aspect, 6> kAspects = {Aspect::Framing,   Aspect::Suggestion,  Aspect::Extent,
                                                   Aspect::Condition, Aspect::Probability, Aspect::Number};
inline constexpr std::array<Polarity, 2> kPolarities = {Polarity::Certain, Polarity::Uncertain};
inline constexpr std::size_t kCells = 12;

inline std::string_view to_string(Aspect a) {
  constexpr std::array<std::string_view, 6> names = {"framing",   "suggestion",  "extent",
                                                     "condition", "probability", "number"};
  return names[static_cast<std::size_t>(a)];
}

inline std::string_view to_string(Polarity p) { return p == Polarity::Certain ? "certain" : "uncertain"; }

/// Cells are ordered aspect-major: framing_certain, framing_uncertain, ...
inline constexpr std::size_t cell_index(Aspect a, Polarity p) {
  return static_cast<std::size_t>(a) * 2 + static_cast<std::size_t>(p);
}

inline std::string cell_key(Aspect a, Polarity p) { return std::string(to_string(a)) + "_" + std::string(to_string(p)); }

inline const std::array<std::string, kCells>& cell_keys() {
  static const auto keys = [] {
    std::array<std::string, kCells> k;
    for (auto a : kAspects) {
      for (auto p : kPolarities) k[cell_index(a, p)] = cell_key(a, p);
    }
    return k;
  }();
  return keys;
}

inline std::string sentence_key(std::string_view doc_id, std::size_t index) {
  return std::string(doc_id) + "#" + std::to_string(index);
}

struct CertaintyPrediction {
  std::string doc_id;
  std::size_t index = 0;
  std::array<double, kCells> probs{};

  std::string key() const { return sentence_key(doc_id, index); }
  double at(Aspect a, Polarity p) const { return probs[cell_index(a, p)]; }

  void validate() const {
    for (std::size_t i = 0; i < kCells; ++i) {
      if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
        throw SchemaError("probability " + cell_keys()[i] + " of " + key() + " is outside [0, 1]");
      }
    }
  }
  bool operator==(const CertaintyPrediction&) const = default;
};

struct SentenceLabel {
  Sentence sentence;
  std::string criterion;
  double similarity = 0.0;
  RigourLabel doc_label = RigourLabel::NonFourStar;
  bool operator==(const SentenceLabel&) const = default;
};

struct CellStats {
  std::size_t n_four = 0;
  std::size_t n_non = 0;
  double mean_four = 0.0;
  double mean_non = 0.0;
  /// 100 * (mean_four - mean_non); empty when either class has no sentence.
  std::optional<double> diff;
};

struct CriterionBreakdown {
  std::string criterion;
  std::size_t n_four = 0;
  std::size_t n_non = 0;
  std::array<CellStats, kCells> cells;
  bool missing_four() const { return n_four == 0; }
  bool missing_non() const { return n_non == 0; }
};

struct CertaintyBreakdown {
  std::vector<CriterionBreakdown> criteria;

  std::size_t total_sentences() const {
    std::size_t n = 0;
    for (const auto& c : criteria) n += c.n_four + c.n_non;
    return n;
  }

  const CriterionBreakdown* find(std::string_view name) const {
    for (const auto& c : criteria) {
      if (c.criterion == name) return &c;
    }
    return nullptr;
  }
};

}  // namespace rigour::certainty
