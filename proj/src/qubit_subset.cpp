#include "infsamp/qubit_subset.hpp"

#include "infsamp/errors.hpp"

namespace infsamp {

namespace {

void check_qubit(int qubit) {
  if (qubit < 1 || qubit > kMaxQubits) {
    throw ValidationError("qubit index " + std::to_string(qubit) + " outside 1.." +
                          std::to_string(kMaxQubits));
  }
}

}  // namespace

QubitSubset QubitSubset::of(std::initializer_list<int> qubits) {
  return from_qubits(std::span<const int>(qubits.begin(), qubits.size()));
}

QubitSubset QubitSubset::from_qubits(std::span<const int> qubits) {
  std::uint64_t mask = 0;
  for (int q : qubits) {
    check_qubit(q);
    mask |= std::uint64_t{1} << (q - 1);
  }
  return QubitSubset(mask);
}

QubitSubset QubitSubset::full(int n) {
  if (n < 0 || n > kMaxQubits) throw ValidationError("qubit count out of range");
  return QubitSubset(low_mask(n));
}

bool QubitSubset::contains(int qubit) const {
  if (qubit < 1 || qubit > kMaxQubits) return false;
  return ((mask_ >> (qubit - 1)) & 1U) != 0;
}

QubitSubset QubitSubset::complement(int n) const {
  if (n < 0 || n > kMaxQubits) throw ValidationError("qubit count out of range");
  if ((mask_ & ~low_mask(n)) != 0) {
    throw ValidationError("subset " + to_string() + " is not contained in [" + std::to_string(n) + "]");
  }
  return QubitSubset(low_mask(n) & ~mask_);
}

std::vector<int> QubitSubset::qubits() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
  return out;
}

std::string QubitSubset::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int q : qubits()) {
    if (!first) s += ",";
    s += std::to_string(q);
    first = false;
  }
  return s + "}";
}

std::vector<QubitSubset> all_subsets(int n) {
  if (n < 0 || n > 24) throw SizeError("all_subsets: n must be in 0..24");
  std::vector<QubitSubset> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) out.push_back(QubitSubset::from_mask(m));
  return out;
}

}  // namespace infsamp
