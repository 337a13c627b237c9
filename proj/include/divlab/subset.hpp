#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace divlab {

/// Largest ground set any table may be built over.
inline constexpr std::size_t kMaxGroundSize = 16;
/// Ground-set cap used when the caller does not configure one.
inline constexpr std::size_t kDefaultGroundCap = 12;

/// A subset of a ground set {0, ..., n-1}, n <= kMaxGroundSize, as a bit mask.
/// The mask doubles as the index into every value table.
class SubsetKey {
 public:
  constexpr SubsetKey() = default;
  constexpr explicit SubsetKey(std::uint32_t bits) : bits_(bits) {}

  static constexpr SubsetKey singleton(std::size_t i) { return SubsetKey{std::uint32_t{1} << i}; }
  static constexpr SubsetKey full(std::size_t n) {
    return SubsetKey{n == 0 ? 0u : static_cast<std::uint32_t>((std::uint64_t{1} << n) - 1)};
  }
  static SubsetKey of(std::initializer_list<std::size_t> members) {
    SubsetKey s;
    for (auto m : members) s = s.with(m);
    return s;
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1u; }
  constexpr bool is_subset_of(SubsetKey other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr bool intersects(SubsetKey other) const { return (bits_ & other.bits_) != 0; }
  /// True when every member is below n.
  constexpr bool fits(std::size_t n) const { return is_subset_of(full(n)); }

  constexpr SubsetKey with(std::size_t i) const { return SubsetKey{bits_ | (std::uint32_t{1} << i)}; }
  constexpr SubsetKey without(std::size_t i) const { return SubsetKey{bits_ & ~(std::uint32_t{1} << i)}; }
  constexpr SubsetKey minus(SubsetKey o) const { return SubsetKey{bits_ & ~o.bits_}; }

  /// Index of the lowest member; undefined for the empty set.
  constexpr std::size_t lowest() const { return static_cast<std::size_t>(std::countr_zero(bits_)); }

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    out.reserve(size());
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

  friend constexpr SubsetKey operator|(SubsetKey a, SubsetKey b) { return SubsetKey{a.bits_ | b.bits_}; }
  friend constexpr SubsetKey operator&(SubsetKey a, SubsetKey b) { return SubsetKey{a.bits_ & b.bits_}; }
  friend constexpr bool operator==(SubsetKey, SubsetKey) = default;
  friend constexpr auto operator<=>(SubsetKey, SubsetKey) = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Number of subsets of an n-element ground set.
constexpr std::size_t subset_count(std::size_t n) { return std::size_t{1} << n; }

/// Calls fn(sub) for every subset of `set`, including the empty set and `set` itself.
template <typename Fn>
void for_each_subset(SubsetKey set, Fn&& fn) {
  const std::uint32_t s = set.bits();
  std::uint32_t sub = s;
  while (true) {
    fn(SubsetKey{sub});
    if (sub == 0) break;
    sub = (sub - 1) & s;
  }
}

/// Maps a subset of the ground set onto positions within `frame`: member
/// frame[k] becomes bit k. Members outside the frame are dropped.
inline SubsetKey compress(SubsetKey set, SubsetKey frame) {
  std::uint32_t out = 0;
  std::size_t k = 0;
  for (std::uint32_t b = frame.bits(); b != 0; b &= b - 1, ++k) {
    if (set.bits() & (b & -b)) out |= std::uint32_t{1} << k;
  }
  return SubsetKey{out};
}

/// Inverse of compress: bit k of `local` becomes the k-th member of `frame`.
inline SubsetKey expand(SubsetKey local, SubsetKey frame) {
  std::uint32_t out = 0;
  std::size_t k = 0;
  for (std::uint32_t b = frame.bits(); b != 0; b &= b - 1, ++k) {
    if (local.contains(k)) out |= (b & -b);
  }
  return SubsetKey{out};
}

}  // namespace divlab
