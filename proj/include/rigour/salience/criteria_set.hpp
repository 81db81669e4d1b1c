#pragma once

#include <bit>
#include <cstdint>
#include <iterator>
#include <string>
#include <vector>

#include "rigour/core/error.hpp"
#include "rigour/criteria/registry.hpp"
#include "rigour/embed/pooling.hpp"

namespace rigour::salience {

using criteria::CriteriaRegistry;

inline constexpr std::size_t kMaxRegistrySize = 24;

inline constexpr std::string_view kRetrievalInstruction =
    "Given the following definitions, retrieve the appropriate document that contains the following criteria:";

/// Non-empty subset of a registry; bit i is registry position i.
class CriteriaSet {
 public:
  CriteriaSet(std::uint32_t bitmask, const CriteriaRegistry& registry)
      : CriteriaSet(bitmask, registry.size(), registry.hash()) {}

  CriteriaSet(std::uint32_t bitmask, std::size_t registry_size, std::string registry_hash)
      : bitmask_(bitmask), width_(registry_size), hash_(std::move(registry_hash)) {
    if (registry_size > kMaxRegistrySize) throw RegistryTooLarge(registry_size);
    if (bitmask == 0) throw std::invalid_argument("criteria set is empty");
    if (registry_size < 32 && (bitmask >> registry_size) != 0) {
      throw std::invalid_argument("criteria set has bits beyond the registry");
    }
  }

  static CriteriaSet from_names(const std::vector<std::string>& names, const CriteriaRegistry& registry) {
    std::uint32_t mask = 0;
    for (const auto& n : names) {
      auto i = registry.index_of(n);
      if (!i) throw SchemaError("unknown criterion: " + n);
      mask |= 1u << *i;
    }
    return CriteriaSet(mask, registry);
  }

  std::uint32_t bitmask() const noexcept { return bitmask_; }
  std::size_t width() const noexcept { return width_; }
  const std::string& registry_hash() const noexcept { return hash_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bitmask_)); }
  bool contains(std::size_t i) const noexcept { return i < 32 && ((bitmask_ >> i) & 1u) != 0; }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < width_; ++i) {
      if (contains(i)) out.push_back(i);
    }
    return out;
  }

  std::vector<std::string> names(const CriteriaRegistry& registry) const {
    check(registry);
    std::vector<std::string> out;
    for (auto i : indices()) out.push_back(registry[i].name);
    return out;
  }

  void check(const CriteriaRegistry& registry) const {
    if (registry.hash() != hash_) throw RegistryMismatch();
  }

  CriteriaSet operator|(const CriteriaSet& o) const {
    same_registry(o);
    return CriteriaSet(bitmask_ | o.bitmask_, width_, hash_);
  }

  /// Throws std::invalid_argument when the intersection is empty.
  CriteriaSet operator&(const CriteriaSet& o) const {
    same_registry(o);
    return CriteriaSet(bitmask_ & o.bitmask_, width_, hash_);
  }

  bool is_subset_of(const CriteriaSet& o) const {
    same_registry(o);
    return (bitmask_ & ~o.bitmask_) == 0;
  }

  bool operator==(const CriteriaSet&) const = default;

 private:
  void same_registry(const CriteriaSet& o) const {
    if (hash_ != o.hash_) throw RegistryMismatch();
  }

  std::uint32_t bitmask_;
  std::size_t width_;
  std::string hash_;
};

/// Every non-empty subset in ascending bitmask order, produced lazily.
class CriteriaSetRange {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = CriteriaSet;
    using difference_type = std::ptrdiff_t;

    iterator(std::uint32_t mask, const CriteriaSetRange* range) : mask_(mask), range_(range) {}
    CriteriaSet operator*() const { return CriteriaSet(mask_, range_->width_, range_->hash_); }
    iterator& operator++() {
      ++mask_;
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++mask_;
      return copy;
    }
    bool operator==(const iterator& o) const { return mask_ == o.mask_; }

   private:
    std::uint32_t mask_;
    const CriteriaSetRange* range_;
  };

  CriteriaSetRange(std::size_t width, std::string hash) : width_(width), hash_(std::move(hash)) {}

  iterator begin() const { return {1u, this}; }
  iterator end() const { return {static_cast<std::uint32_t>(1u << width_), this}; }
  std::uint64_t count() const noexcept { return (std::uint64_t{1} << width_) - 1; }

 private:
  std::size_t width_;
  std::string hash_;
};

inline CriteriaSetRange enumerate_criteria_sets(const CriteriaRegistry& registry) {
  if (registry.empty()) throw std::invalid_argument("registry is empty");
  if (registry.size() > kMaxRegistrySize) throw RegistryTooLarge(registry.size());
  return CriteriaSetRange(registry.size(), registry.hash());
}

/// Instruction plus the included criteria as "Name: Definition" blocks in
/// registry order, separated by blank lines.
inline embed::QuerySpec build_query(const CriteriaSet& set, const CriteriaRegistry& registry) {
  set.check(registry);
  std::vector<std::string> blocks;
  for (auto i : set.indices()) blocks.push_back(registry[i].name + ": " + registry[i].definition);
  return {std::string(kRetrievalInstruction), text::join(blocks, "\n\n")};
}

}  // namespace rigour::salience
