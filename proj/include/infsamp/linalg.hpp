#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace infsamp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

Matrix kron(const Matrix& a, const Matrix& b);

// Largest entrywise modulus of a - a^dagger.
double hermiticity_defect(const Matrix& a);

// Eigenvalues (ascending) of the Hermitian part of a.
RealVector hermitian_eigenvalues(const Matrix& a);

// Principal square root of a PSD matrix; eigenvalues are clipped at zero.
Matrix psd_sqrt(const Matrix& a);

// Eigenvalue clipping: nearest PSD matrix in Frobenius norm.
Matrix project_psd(const Matrix& a);

// Partial trace of a bipartite operator on C^{d_first} (x) C^{d_second}.
Matrix trace_first(const Matrix& a, std::size_t d_first, std::size_t d_second);
Matrix trace_second(const Matrix& a, std::size_t d_first, std::size_t d_second);

// Embeds an operator acting on `positions` (0-based, most significant first)
// of a `register_size`-qubit register, identity elsewhere. The operator's own
// basis orders its qubits as listed in `positions`.
Matrix embed_operator(const Matrix& op, std::span<const int> positions, int register_size);

}  // namespace infsamp
