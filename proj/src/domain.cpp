#include "gamecheck/domain.hpp"

#include <cmath>
#include <set>

namespace gamecheck {

std::optional<std::uint64_t> domain_product(const GameSpec& spec) {
  std::uint64_t total = 1;
  for (const auto& a : spec.attributes) {
    const auto size = static_cast<std::uint64_t>(a.hi) - static_cast<std::uint64_t>(a.lo) + 1;
    if (__builtin_mul_overflow(total, size, &total)) return std::nullopt;
  }
  return total;
}

double domain_product_log10(const GameSpec& spec) {
  double sum = 0;
  for (const auto& a : spec.attributes) {
    sum += std::log10(static_cast<double>(a.hi) - static_cast<double>(a.lo) + 1.0);
  }
  return sum;
}

StateCodec::StateCodec(const GameSpec& spec) {
  const auto total = domain_product(spec);
  if (!total) {
    throw DomainTooLarge("attribute domain product (about 10^" +
                         std::to_string(static_cast<int>(domain_product_log10(spec))) +
                         ") does not fit a 64-bit state code");
  }
  count_ = *total;
  const std::size_t n = spec.attributes.size();
  lo_.resize(n);
  radix_.resize(n);
  stride_.resize(n);
  std::uint64_t stride = 1;
  for (std::size_t i = n; i-- > 0;) {
    lo_[i] = spec.attributes[i].lo;
    radix_[i] = static_cast<std::uint64_t>(spec.attributes[i].hi) - static_cast<std::uint64_t>(spec.attributes[i].lo) + 1;
    stride_[i] = stride;
    stride *= radix_[i];
  }
}

bool StateCodec::in_domain(std::span<const Value> v) const {
  if (v.size() != lo_.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] < lo_[i]) return false;
    if (static_cast<std::uint64_t>(v[i]) - static_cast<std::uint64_t>(lo_[i]) >= radix_[i]) return false;
  }
  return true;
}

std::uint64_t StateCodec::encode(std::span<const Value> v) const {
  if (!in_domain(v)) throw RangeViolation("attribute vector outside the declared domains");
  std::uint64_t code = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    code += (static_cast<std::uint64_t>(v[i]) - static_cast<std::uint64_t>(lo_[i])) * stride_[i];
  }
  return code;
}

void StateCodec::decode(std::uint64_t code, std::span<Value> out) const {
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    const std::uint64_t digit = code / stride_[i];
    code -= digit * stride_[i];
    out[i] = static_cast<Value>(static_cast<std::uint64_t>(lo_[i]) + digit);
  }
}

std::vector<Value> StateCodec::decode(std::uint64_t code) const {
  std::vector<Value> out(lo_.size());
  decode(code, out);
  return out;
}

AttributeVectorRange::iterator& AttributeVectorRange::iterator::operator++() {
  ++index_;
  if (index_ < codec_->count()) codec_->decode(index_, current_);
  return *this;
}

AttributeVectorRange::iterator AttributeVectorRange::begin() const {
  iterator it;
  it.codec_ = &codec_;
  it.index_ = 0;
  it.current_.resize(codec_.width());
  if (codec_.count() > 0) codec_.decode(0, it.current_);
  return it;
}

AttributeVectorRange::iterator AttributeVectorRange::end() const {
  iterator it;
  it.codec_ = &codec_;
  it.index_ = codec_.count();
  return it;
}

AttributeVectorRange enumerate_attribute_vectors(const GameSpec& spec, std::uint64_t cap) {
  StateCodec codec(spec);
  if (codec.count() > cap) {
    throw DomainTooLarge("|V| = " + std::to_string(codec.count()) + " exceeds the enumeration cap " +
                         std::to_string(cap));
  }
  return AttributeVectorRange(std::move(codec));
}

std::vector<std::vector<Value>> initial_vectors(const GameSpec& spec, std::uint64_t cap) {
  std::vector<std::vector<Value>> out;
  std::set<std::vector<Value>> seen;
  for (const auto& v : spec.initial.vectors) {
    if (seen.insert(v).second) out.push_back(v);
  }
  if (spec.initial.constraints.empty()) return out;
  for (const auto& v : enumerate_attribute_vectors(spec, cap)) {
    EvalFrame frame{v, v, {}, nullptr};
    bool ok = true;
    for (const auto& c : spec.initial.constraints) {
      if (!evaluate(c, frame)) {
        ok = false;
        break;
      }
    }
    if (ok && seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace gamecheck
