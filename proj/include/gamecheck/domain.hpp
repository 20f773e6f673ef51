#pragma once

#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

#include "gamecheck/game.hpp"

namespace gamecheck {

inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

// Number of attribute vectors |V| = prod(hi - lo + 1), or nullopt when the
// product does not fit in 64 bits.
std::optional<std::uint64_t> domain_product(const GameSpec& spec);

// log10 |V|, usable when the exact product overflows.
double domain_product_log10(const GameSpec& spec);

// Mixed-radix code over declaration order, first attribute most significant,
// so increasing codes enumerate V in lexicographic order.
class StateCodec {
 public:
  StateCodec() = default;
  // Throws DomainTooLarge when |V| does not fit in 64 bits.
  explicit StateCodec(const GameSpec& spec);

  std::size_t width() const { return lo_.size(); }
  std::uint64_t count() const { return count_; }

  std::uint64_t encode(std::span<const Value> v) const;
  void decode(std::uint64_t code, std::span<Value> out) const;
  std::vector<Value> decode(std::uint64_t code) const;
  bool in_domain(std::span<const Value> v) const;

 private:
  std::vector<Value> lo_;
  std::vector<std::uint64_t> radix_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t count_ = 0;
};

// Lazy range over V in lexicographic order.
class AttributeVectorRange {
 public:
  class iterator {
   public:
    using value_type = std::vector<Value>;
    using difference_type = std::ptrdiff_t;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    const std::vector<Value>& operator*() const { return current_; }
    const std::vector<Value>* operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator t = *this;
      ++*this;
      return t;
    }
    bool operator==(const iterator& o) const { return index_ == o.index_; }

   private:
    friend class AttributeVectorRange;
    const StateCodec* codec_ = nullptr;
    std::uint64_t index_ = 0;
    std::vector<Value> current_;
  };

  explicit AttributeVectorRange(StateCodec codec) : codec_(std::move(codec)) {}
  iterator begin() const;
  iterator end() const;
  std::uint64_t size() const { return codec_.count(); }

 private:
  StateCodec codec_;
};

// Throws DomainTooLarge when |V| exceeds `cap`.
AttributeVectorRange enumerate_attribute_vectors(const GameSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

// Explicit vectors first (in order), then constraint solutions in
// lexicographic order; duplicates dropped. Constraint enumeration is bounded by
// `cap` like enumerate_attribute_vectors.
std::vector<std::vector<Value>> initial_vectors(const GameSpec& spec, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace gamecheck
