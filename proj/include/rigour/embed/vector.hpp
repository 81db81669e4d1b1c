#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigour/core/error.hpp"

namespace rigour::embed {

enum class EmbeddingMode { Query, Document };

inline std::string_view to_string(EmbeddingMode m) { return m == EmbeddingMode::Query ? "query" : "document"; }

/// How a vector was pooled. ConcatenationFallback marks backends that could
/// not pool over query tokens only and embedded "instruction\nquery" instead.
enum class Pooling { QueryTokenMean, ConcatenationFallback, DocumentMean, ChunkedDocumentMean };

inline std::string_view to_string(Pooling p) {
  switch (p) {
    case Pooling::QueryTokenMean: return "query-token-mean";
    case Pooling::ConcatenationFallback: return "concatenation-fallback";
    case Pooling::DocumentMean: return "document-mean";
    case Pooling::ChunkedDocumentMean: return "chunked-document-mean";
  }
  return "";
}

struct Provenance {
  std::string provider_id;
  std::optional<std::string> instruction;
  Pooling pooling = Pooling::DocumentMean;
};

/// Immutable embedding with its Euclidean norm cached at construction.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  explicit EmbeddingVector(std::vector<double> values, Provenance provenance = {})
      : values_(std::move(values)), provenance_(std::move(provenance)) {
    double sq = 0.0;
    for (double v : values_) {
      if (!std::isfinite(v)) throw std::invalid_argument("embedding contains a non-finite value");
      sq += v * v;
    }
    norm_ = std::sqrt(sq);
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t dim() const noexcept { return values_.size(); }
  double norm() const noexcept { return norm_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
  double norm_ = 0.0;
  Provenance provenance_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// a.b / (|a||b|), clamped to [-1, 1] against rounding.
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
  if (a.norm() == 0.0 || b.norm() == 0.0) throw ZeroVector();
  const double c = dot(a.values(), b.values()) / (a.norm() * b.norm());
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace rigour::embed
