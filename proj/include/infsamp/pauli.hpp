#pragma once

#include <cstdint>
#include <vector>

#include "infsamp/linalg.hpp"

namespace infsamp {

// Default ceiling on qubit count for anything that materializes a 4^n x 4^n
// process matrix. Callers may pass a different cap explicitly.
inline constexpr int kDefaultDenseQubitCap = 12;

// Pauli string x = (x_1, ..., x_n), x_i in {0=I, 1=X, 2=Y, 3=Z}. The flat
// basis index is the base-4 number x_1 x_2 ... x_n with qubit 1 as the most
// significant digit; every module shares this order.
class PauliIndexVector {
 public:
  explicit PauliIndexVector(std::vector<std::uint8_t> digits);

  static PauliIndexVector decode(std::uint64_t index, int num_qubits);
  std::uint64_t encode() const;

  int num_qubits() const { return static_cast<int>(digits_.size()); }
  // Digit on qubit q (1-based).
  std::uint8_t on(int qubit) const { return digits_.at(static_cast<std::size_t>(qubit - 1)); }
  const std::vector<std::uint8_t>& digits() const { return digits_; }

 private:
  std::vector<std::uint8_t> digits_;
};

// Single-qubit sigma_0..sigma_3.
const Matrix& pauli_matrix(int digit);

// sigma_x for a flat index x over n qubits.
Matrix pauli_operator(std::uint64_t index, int num_qubits);

// Digit of qubit q (1-based) inside a flat index over n qubits.
constexpr int pauli_digit(std::uint64_t index, int num_qubits, int qubit) {
  return static_cast<int>((index >> (2 * (num_qubits - qubit))) & 3U);
}

// All 4^n operators in index order. Throws SizeError above `max_qubits`.
std::vector<Matrix> pauli_basis(int num_qubits, int max_qubits = kDefaultDenseQubitCap);

}  // namespace infsamp
