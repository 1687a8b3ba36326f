#pragma once

#include <cstddef>
#include <vector>

#include "infsamp/linalg.hpp"

namespace infsamp {

// Validation tolerances shared by all process representations. Inputs that
// fail are rejected, never silently repaired.
struct Tolerance {
  static constexpr double kHermitian = 1e-10;
  static constexpr double kMinEigenvalue = -1e-9;
  static constexpr double kTrace = 1e-9;
  static constexpr double kCptp = 1e-9;
};

// Kraus operators {K_i} of an n-qubit channel; sum_i K_i^dagger K_i = I.
class KrausSet {
 public:
  KrausSet(int num_qubits, std::vector<Matrix> operators);

  static KrausSet identity(int num_qubits);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return std::size_t{1} << num_qubits_; }
  const std::vector<Matrix>& operators() const { return operators_; }

 private:
  int num_qubits_;
  std::vector<Matrix> operators_;
};

// Unnormalized Choi matrix J = sum_{a,b} Phi(|a><b|) (x) |a><b|. The output
// space is the first tensor factor; Tr J = d and Tr_out J = I.
class ChoiMatrix {
 public:
  ChoiMatrix(int num_qubits, Matrix entries);

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return std::size_t{1} << num_qubits_; }
  const Matrix& entries() const { return entries_; }

 private:
  int num_qubits_;
  Matrix entries_;
};

// Process matrix chi with Phi(rho) = sum_{x,y} chi_{xy} sigma_x rho sigma_y,
// indexed in the shared Pauli order. Hermitian, PSD, unit trace.
class ChiMatrix {
 public:
  ChiMatrix(int num_qubits, Matrix entries);

  int num_qubits() const { return num_qubits_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const Matrix& entries() const { return entries_; }
  // Real parts of the diagonal chi_{xx}.
  RealVector diagonal() const { return entries_.diagonal().real(); }

 private:
  int num_qubits_;
  Matrix entries_;
};

// Row-stacking vectorization: vec(|a><b|) = |a>|b>, i.e. vec(A)[a*d + b] = A(a, b).
Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, std::size_t d);

ChoiMatrix kraus_to_choi(const KrausSet& kraus);
ChiMatrix choi_to_chi(const ChoiMatrix& choi);
ChoiMatrix chi_to_choi(const ChiMatrix& chi);

// Direct Pauli expansion K_i = sum_x c_ix sigma_x, chi = sum_i c_i c_i^dagger.
ChiMatrix kraus_to_chi(const KrausSet& kraus);

// Canonical Kraus operators from the eigendecomposition; eigenvalues at or
// below `threshold` are dropped.
KrausSet choi_to_kraus(const ChoiMatrix& choi, double threshold = 1e-12);
KrausSet chi_to_kraus(const ChiMatrix& chi, double threshold = 1e-12);

Matrix apply_process(const KrausSet& kraus, const Matrix& rho);
Matrix apply_process(const ChiMatrix& chi, const Matrix& rho);

// Channel that applies `first`, then `second`. The Kraus list is compressed to
// the canonical form once it grows beyond d^2 operators.
KrausSet compose(const KrausSet& first, const KrausSet& second);

}  // namespace infsamp
