#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace infsamp {

inline constexpr int kMaxQubits = 64;

// A set of qubits drawn from [n] = {1, ..., n}. Qubit i is stored at bit i-1.
class QubitSubset {
 public:
  constexpr QubitSubset() = default;

  static constexpr QubitSubset from_mask(std::uint64_t mask) { return QubitSubset(mask); }
  static QubitSubset of(std::initializer_list<int> qubits);
  static QubitSubset from_qubits(std::span<const int> qubits);
  static QubitSubset full(int n);

  constexpr std::uint64_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  bool contains(int qubit) const;

  QubitSubset complement(int n) const;
  constexpr bool intersects(QubitSubset other) const { return (mask_ & other.mask_) != 0; }
  constexpr bool is_subset_of(QubitSubset other) const { return (mask_ & ~other.mask_) == 0; }
  // Highest qubit index present, 0 when empty.
  constexpr int max_qubit() const { return mask_ == 0 ? 0 : 64 - std::countl_zero(mask_); }

  std::vector<int> qubits() const;
  std::string to_string() const;

  friend constexpr QubitSubset operator|(QubitSubset a, QubitSubset b) { return QubitSubset(a.mask_ | b.mask_); }
  friend constexpr QubitSubset operator&(QubitSubset a, QubitSubset b) { return QubitSubset(a.mask_ & b.mask_); }
  friend constexpr bool operator==(QubitSubset a, QubitSubset b) = default;

 private:
  constexpr explicit QubitSubset(std::uint64_t mask) : mask_(mask) {}
  std::uint64_t mask_ = 0;
};

// Mask with bits 0..n-1 set.
constexpr std::uint64_t low_mask(int n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

// Every subset of [n] including the empty set, in increasing mask order.
std::vector<QubitSubset> all_subsets(int n);

}  // namespace infsamp
