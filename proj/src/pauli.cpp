#include "infsamp/pauli.hpp"

#include <array>
#include <string>

#include "infsamp/errors.hpp"

namespace infsamp {

PauliIndexVector::PauliIndexVector(std::vector<std::uint8_t> digits) : digits_(std::move(digits)) {
  if (digits_.size() > 32) throw SizeError("Pauli strings longer than 32 qubits do not fit a 64-bit index");
  for (auto d : digits_) {
    if (d > 3) throw ValidationError("Pauli digit must be in {0,1,2,3}");
  }
}

PauliIndexVector PauliIndexVector::decode(std::uint64_t index, int num_qubits) {
  if (num_qubits < 0 || num_qubits > 32) throw SizeError("Pauli index qubit count must be in 0..32");
  if (num_qubits < 32 && index >= (std::uint64_t{1} << (2 * num_qubits))) {
    throw ValidationError("Pauli index out of range");
  }
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(num_qubits));
  for (int q = 1; q <= num_qubits; ++q) {
    digits[static_cast<std::size_t>(q - 1)] = static_cast<std::uint8_t>(pauli_digit(index, num_qubits, q));
  }
  return PauliIndexVector(std::move(digits));
}

std::uint64_t PauliIndexVector::encode() const {
  std::uint64_t index = 0;
  for (auto d : digits_) index = (index << 2) | d;
  return index;
}

const Matrix& pauli_matrix(int digit) {
  static const std::array<Matrix, 4> paulis = [] {
    std::array<Matrix, 4> p;
    for (auto& m : p) m = Matrix::Zero(2, 2);
    p[0] << 1, 0, 0, 1;
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -kI, kI, 0;
    p[3] << 1, 0, 0, -1;
    return p;
  }();
  if (digit < 0 || digit > 3) throw ValidationError("Pauli digit must be in {0,1,2,3}");
  return paulis[static_cast<std::size_t>(digit)];
}

Matrix pauli_operator(std::uint64_t index, int num_qubits) {
  if (num_qubits < 1) throw ValidationError("pauli_operator: need at least one qubit");
  Matrix out = pauli_matrix(pauli_digit(index, num_qubits, 1));
  for (int q = 2; q <= num_qubits; ++q) out = kron(out, pauli_matrix(pauli_digit(index, num_qubits, q)));
  return out;
}

std::vector<Matrix> pauli_basis(int num_qubits, int max_qubits) {
  if (num_qubits < 1) throw ValidationError("pauli_basis: need at least one qubit");
  if (num_qubits > max_qubits) {
    throw SizeError("pauli_basis: " + std::to_string(num_qubits) + " qubits exceeds dense cap of " +
                    std::to_string(max_qubits));
  }
  std::vector<Matrix> basis;
  const std::uint64_t count = std::uint64_t{1} << (2 * num_qubits);
  basis.reserve(count);
  if (num_qubits == 1) {
    for (int d = 0; d < 4; ++d) basis.push_back(pauli_matrix(d));
    return basis;
  }
  // sigma_{x_1 ... x_n} = sigma_{x_1} (x) sigma_{x_2 ... x_n}
  const auto tail = pauli_basis(num_qubits - 1, max_qubits);
  for (int d = 0; d < 4; ++d) {
    for (const auto& t : tail) basis.push_back(kron(pauli_matrix(d), t));
  }
  return basis;
}

}  // namespace infsamp
