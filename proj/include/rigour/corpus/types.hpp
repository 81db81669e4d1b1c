#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "rigour/core/error.hpp"

namespace rigour {

/// FourStar is the positive class in every numeric encoding.
enum class RigourLabel { FourStar, NonFourStar };

inline std::string_view to_string(RigourLabel l) { return l == RigourLabel::FourStar ? "4*" : "non-4*"; }

inline std::optional<RigourLabel> parse_label(std::string_view s) {
  if (s == "4*") return RigourLabel::FourStar;
  if (s == "non-4*") return RigourLabel::NonFourStar;
  return std::nullopt;
}

inline int encode(RigourLabel l) { return l == RigourLabel::FourStar ? 1 : 0; }

inline RigourLabel flipped(RigourLabel l) {
  return l == RigourLabel::FourStar ? RigourLabel::NonFourStar : RigourLabel::FourStar;
}

enum class DocumentState { Raw = 0, Stripped = 1, Masked = 2 };

inline std::string_view to_string(DocumentState s) {
  switch (s) {
    case DocumentState::Raw: return "raw";
    case DocumentState::Stripped: return "stripped";
    case DocumentState::Masked: return "masked";
  }
  return "raw";
}

inline std::optional<DocumentState> parse_state(std::string_view s) {
  if (s == "raw") return DocumentState::Raw;
  if (s == "stripped") return DocumentState::Stripped;
  if (s == "masked") return DocumentState::Masked;
  return std::nullopt;
}

struct Document {
  std::string id;
  std::optional<std::string> venue;
  std::optional<std::int64_t> year;
  std::string abstract;
  std::string introduction;
  std::optional<RigourLabel> label;
  DocumentState state = DocumentState::Raw;

  /// Abstract and introduction as one text, the unit every embedding sees.
  std::string text() const { return abstract + "\n\n" + introduction; }

  /// States only move forward: Raw -> Stripped -> Masked.
  void advance(DocumentState next) {
    if (static_cast<int>(next) < static_cast<int>(state)) {
      throw InvalidState("document " + id + " cannot move from " + std::string(to_string(state)) +
                         " back to " + std::string(to_string(next)));
    }
    state = next;
  }

  bool operator==(const Document&) const = default;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::string text;

  std::string key() const { return doc_id + "#" + std::to_string(index); }
  bool operator==(const Sentence&) const = default;
};

inline constexpr std::string_view kTrainSplit = "train";
inline constexpr std::string_view kValSplit = "val";
inline constexpr std::string_view kTestSplit = "test";

/// Ordered, immutable collection of documents with optional named splits.
class Corpus {
 public:
  using Splits = std::map<std::string, std::vector<std::string>>;

  Corpus() = default;

  explicit Corpus(std::vector<Document> documents, Splits splits = {})
      : documents_(std::move(documents)), splits_(std::move(splits)) {
    for (std::size_t i = 0; i < documents_.size(); ++i) {
      if (documents_[i].id.empty()) throw MissingRequiredField("id");
      if (!index_.emplace(documents_[i].id, i).second) throw DuplicateId(documents_[i].id);
    }
    std::unordered_set<std::string> seen;
    for (const auto& [name, ids] : splits_) {
      for (const auto& id : ids) {
        if (!index_.contains(id)) throw SchemaError("split " + name + " references unknown id " + id);
        if (!seen.insert(id).second) throw SchemaError("id " + id + " appears in more than one split");
      }
    }
  }

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const Splits& splits() const noexcept { return splits_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }

  const Document& at(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) throw std::out_of_range("unknown document id " + std::string(id));
    return documents_[it->second];
  }

  bool contains(std::string_view id) const { return index_.contains(std::string(id)); }

  /// Documents of one split in corpus order; empty when the split is absent.
  std::vector<Document> split(std::string_view name) const {
    std::vector<Document> out;
    auto it = splits_.find(std::string(name));
    if (it == splits_.end()) return out;
    std::unordered_set<std::string> wanted(it->second.begin(), it->second.end());
    for (const auto& d : documents_) {
      if (wanted.contains(d.id)) out.push_back(d);
    }
    return out;
  }

  std::optional<std::string> split_of(std::string_view id) const {
    for (const auto& [name, ids] : splits_) {
      for (const auto& x : ids) {
        if (x == id) return name;
      }
    }
    return std::nullopt;
  }

  bool fully_labeled() const {
    for (const auto& d : documents_) {
      if (!d.label) return false;
    }
    return !documents_.empty();
  }

  std::vector<RigourLabel> labels() const {
    std::vector<RigourLabel> out;
    out.reserve(documents_.size());
    for (const auto& d : documents_) {
      if (!d.label) throw MissingRequiredField("label (document " + d.id + ")");
      out.push_back(*d.label);
    }
    return out;
  }

 private:
  std::vector<Document> documents_;
  Splits splits_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace rigour
