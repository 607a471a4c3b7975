#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace pagesel {

/// Set of function ids over a fixed universe [0, universe), packed into
/// 64-bit words. This is the lattice element of the whole analysis, so set
/// algebra has to be exact and cheap.
class FuncSet {
 public:
  FuncSet() = default;
  explicit FuncSet(uint32_t universe)
      : universe_(universe), bits_((universe + 63) / 64, 0) {}

  static FuncSet single(uint32_t universe, uint32_t id) {
    FuncSet s(universe);
    s.insert(id);
    return s;
  }

  static FuncSet all(uint32_t universe) {
    FuncSet s(universe);
    for (auto& w : s.bits_) w = ~uint64_t{0};
    s.trim();
    return s;
  }

  uint32_t universe() const { return universe_; }

  bool contains(uint32_t id) const {
    assert(id < universe_);
    return (bits_[id / 64] >> (id % 64)) & 1;
  }

  void insert(uint32_t id) {
    assert(id < universe_);
    bits_[id / 64] |= uint64_t{1} << (id % 64);
  }

  bool empty() const {
    for (uint64_t w : bits_)
      if (w) return false;
    return true;
  }

  uint32_t count() const {
    uint32_t c = 0;
    for (uint64_t w : bits_) c += static_cast<uint32_t>(__builtin_popcountll(w));
    return c;
  }

  bool operator==(const FuncSet& o) const {
    assert(universe_ == o.universe_);
    return bits_ == o.bits_;
  }
  bool operator!=(const FuncSet& o) const { return !(*this == o); }

  FuncSet& operator|=(const FuncSet& o) {
    assert(universe_ == o.universe_);
    for (size_t i = 0; i < bits_.size(); ++i) bits_[i] |= o.bits_[i];
    return *this;
  }

  /// Set difference.
  FuncSet& operator-=(const FuncSet& o) {
    assert(universe_ == o.universe_);
    for (size_t i = 0; i < bits_.size(); ++i) bits_[i] &= ~o.bits_[i];
    return *this;
  }

  FuncSet operator|(const FuncSet& o) const {
    FuncSet r = *this;
    r |= o;
    return r;
  }
  FuncSet operator-(const FuncSet& o) const {
    FuncSet r = *this;
    r -= o;
    return r;
  }

  bool is_subset_of(const FuncSet& o) const {
    assert(universe_ == o.universe_);
    for (size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] & ~o.bits_[i]) return false;
    return true;
  }

  /// Members in ascending id order.
  std::vector<uint32_t> members() const {
    std::vector<uint32_t> out;
    out.reserve(count());
    for (uint32_t i = 0; i < universe_; ++i)
      if (contains(i)) out.push_back(i);
    return out;
  }

 private:
  void trim() {
    if (universe_ % 64 != 0 && !bits_.empty())
      bits_.back() &= (uint64_t{1} << (universe_ % 64)) - 1;
  }

  uint32_t universe_ = 0;
  std::vector<uint64_t> bits_;
};

}  // namespace pagesel
