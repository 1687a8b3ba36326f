#include "infsamp/process.hpp"

#include <cmath>
#include <string>

#include "infsamp/errors.hpp"
#include "infsamp/pauli.hpp"

namespace infsamp {

namespace {

void require_qubits(int num_qubits, const char* what) {
  if (num_qubits < 0 || num_qubits > 16) {
    throw SizeError(std::string(what) + ": qubit count must be in 0..16 for dense storage");
  }
}

void require_square(const Matrix& m, Eigen::Index size, const char* what) {
  if (m.rows() != size || m.cols() != size) {
    throw ValidationError(std::string(what) + ": expected " + std::to_string(size) + "x" +
                          std::to_string(size) + " matrix, got " + std::to_string(m.rows()) + "x" +
                          std::to_string(m.cols()));
  }
}

void require_hermitian_psd(const Matrix& m, const char* what) {
  const double defect = hermiticity_defect(m);
  if (defect > Tolerance::kHermitian) {
    throw ValidationError(std::string(what) + ": not Hermitian (defect " + std::to_string(defect) + ")");
  }
  const double min_eig = hermitian_eigenvalues(m)(0);
  if (min_eig < Tolerance::kMinEigenvalue) {
    throw ValidationError(std::string(what) + ": not positive semidefinite (min eigenvalue " +
                          std::to_string(min_eig) + ")");
  }
}

// Columns vec(sigma_x) / sqrt(d) in Pauli index order.
Matrix pauli_change_of_basis(int num_qubits) {
  const auto basis = pauli_basis(num_qubits);
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  Matrix u(d * d, d * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t x = 0; x < basis.size(); ++x) u.col(static_cast<Eigen::Index>(x)) = vec(basis[x]) * scale;
  return u;
}

}  // namespace

KrausSet::KrausSet(int num_qubits, std::vector<Matrix> operators)
    : num_qubits_(num_qubits), operators_(std::move(operators)) {
  require_qubits(num_qubits_, "KrausSet");
  if (operators_.empty()) throw ValidationError("KrausSet: at least one operator required");
  const auto d = static_cast<Eigen::Index>(dim());
  Matrix sum = Matrix::Zero(d, d);
  for (const auto& k : operators_) {
    require_square(k, d, "KrausSet");
    sum += k.adjoint() * k;
  }
  const double defect = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (defect > Tolerance::kCptp) {
    throw ValidationError("KrausSet: sum K^dagger K deviates from identity by " + std::to_string(defect));
  }
}

KrausSet KrausSet::identity(int num_qubits) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  return KrausSet(num_qubits, {Matrix::Identity(d, d)});
}

ChoiMatrix::ChoiMatrix(int num_qubits, Matrix entries) : num_qubits_(num_qubits), entries_(std::move(entries)) {
  require_qubits(num_qubits_, "ChoiMatrix");
  const auto d = static_cast<Eigen::Index>(dim());
  require_square(entries_, d * d, "ChoiMatrix");
  require_hermitian_psd(entries_, "ChoiMatrix");
  const double trace_err = std::abs(entries_.trace() - Complex(static_cast<double>(d), 0.0));
  if (trace_err > Tolerance::kTrace) {
    throw ValidationError("ChoiMatrix: trace deviates from d by " + std::to_string(trace_err));
  }
  const Matrix reduced = trace_first(entries_, dim(), dim());
  const double tp_err = (reduced - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (tp_err > Tolerance::kTrace) {
    throw ValidationError("ChoiMatrix: not trace preserving (Tr_out J - I = " + std::to_string(tp_err) + ")");
  }
}

ChiMatrix::ChiMatrix(int num_qubits, Matrix entries) : num_qubits_(num_qubits), entries_(std::move(entries)) {
  require_qubits(num_qubits_, "ChiMatrix");
  const auto size = static_cast<Eigen::Index>(std::size_t{1} << (2 * num_qubits_));
  require_square(entries_, size, "ChiMatrix");
  require_hermitian_psd(entries_, "ChiMatrix");
  const double trace_err = std::abs(entries_.trace() - Complex(1.0, 0.0));
  if (trace_err > Tolerance::kTrace) {
    throw ValidationError("ChiMatrix: trace deviates from 1 by " + std::to_string(trace_err));
  }
}

Vector vec(const Matrix& a) {
  Vector v(a.rows() * a.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) v(r * a.cols() + c) = a(r, c);
  }
  return v;
}

Matrix unvec(const Vector& v, std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  if (v.size() != n * n) throw ValidationError("unvec: length is not d^2");
  Matrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = v(r * n + c);
  }
  return a;
}

ChoiMatrix kraus_to_choi(const KrausSet& kraus) {
  const auto d = static_cast<Eigen::Index>(kraus.dim());
  Matrix j = Matrix::Zero(d * d, d * d);
  for (const auto& k : kraus.operators()) {
    const Vector v = vec(k);
    j.noalias() += v * v.adjoint();
  }
  return ChoiMatrix(kraus.num_qubits(), std::move(j));
}

ChiMatrix choi_to_chi(const ChoiMatrix& choi) {
  if (choi.num_qubits() == 0) return ChiMatrix(0, choi.entries());
  const Matrix u = pauli_change_of_basis(choi.num_qubits());
  const double d = static_cast<double>(choi.dim());
  Matrix chi = u.adjoint() * choi.entries() * u / d;
  return ChiMatrix(choi.num_qubits(), std::move(chi));
}

ChoiMatrix chi_to_choi(const ChiMatrix& chi) {
  if (chi.num_qubits() == 0) return ChoiMatrix(0, chi.entries());
  const Matrix u = pauli_change_of_basis(chi.num_qubits());
  const double d = static_cast<double>(std::size_t{1} << chi.num_qubits());
  Matrix j = d * (u * chi.entries() * u.adjoint());
  return ChoiMatrix(chi.num_qubits(), std::move(j));
}

ChiMatrix kraus_to_chi(const KrausSet& kraus) {
  const int n = kraus.num_qubits();
  if (n == 0) return ChiMatrix(0, Matrix::Identity(1, 1));
  const auto basis = pauli_basis(n);
  const double d = static_cast<double>(kraus.dim());
  const auto size = static_cast<Eigen::Index>(basis.size());
  Matrix chi = Matrix::Zero(size, size);
  Vector coeffs(size);
  for (const auto& k : kraus.operators()) {
    // sigma_x is Hermitian, so Tr(sigma_x K) = <sigma_x, K>_HS.
    for (Eigen::Index x = 0; x < size; ++x) coeffs(x) = (basis[static_cast<std::size_t>(x)] * k).trace() / d;
    chi.noalias() += coeffs * coeffs.adjoint();
  }
  return ChiMatrix(n, std::move(chi));
}

KrausSet choi_to_kraus(const ChoiMatrix& choi, double threshold) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi.entries() + choi.entries().adjoint()));
  std::vector<Matrix> ops;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double ev = es.eigenvalues()(i);
    if (ev <= threshold) break;
    ops.push_back(std::sqrt(ev) * unvec(es.eigenvectors().col(i), choi.dim()));
  }
  return KrausSet(choi.num_qubits(), std::move(ops));
}

KrausSet chi_to_kraus(const ChiMatrix& chi, double threshold) {
  const int n = chi.num_qubits();
  if (n == 0) return KrausSet::identity(0);
  const auto basis = pauli_basis(n);
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (chi.entries() + chi.entries().adjoint()));
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  std::vector<Matrix> ops;
  for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i) {
    const double ev = es.eigenvalues()(i);
    if (ev <= threshold) break;
    Matrix k = Matrix::Zero(d, d);
    for (std::size_t x = 0; x < basis.size(); ++x) {
      const Complex c = es.eigenvectors()(static_cast<Eigen::Index>(x), i);
      if (c != Complex{}) k += c * basis[x];
    }
    ops.push_back(std::sqrt(ev) * k);
  }
  return KrausSet(n, std::move(ops));
}

Matrix apply_process(const KrausSet& kraus, const Matrix& rho) {
  const auto d = static_cast<Eigen::Index>(kraus.dim());
  require_square(rho, d, "apply_process");
  Matrix out = Matrix::Zero(d, d);
  for (const auto& k : kraus.operators()) out.noalias() += k * rho * k.adjoint();
  return out;
}

Matrix apply_process(const ChiMatrix& chi, const Matrix& rho) {
  const int n = chi.num_qubits();
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n);
  require_square(rho, d, "apply_process");
  if (n == 0) return rho;
  const auto basis = pauli_basis(n);
  const auto& c = chi.entries();
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index x = 0; x < c.rows(); ++x) {
    const Matrix left = basis[static_cast<std::size_t>(x)] * rho;
    for (Eigen::Index y = 0; y < c.cols(); ++y) {
      if (std::abs(c(x, y)) < 1e-15) continue;
      out.noalias() += c(x, y) * left * basis[static_cast<std::size_t>(y)];
    }
  }
  return out;
}

KrausSet compose(const KrausSet& first, const KrausSet& second) {
  if (first.num_qubits() != second.num_qubits()) throw ValidationError("compose: qubit counts differ");
  std::vector<Matrix> ops;
  ops.reserve(first.operators().size() * second.operators().size());
  for (const auto& b : second.operators()) {
    for (const auto& a : first.operators()) {
      Matrix p = b * a;
      if (p.cwiseAbs().maxCoeff() > 1e-14) ops.push_back(std::move(p));
    }
  }
  const std::size_t d = first.dim();
  KrausSet composed(first.num_qubits(), std::move(ops));
  if (composed.operators().size() > d * d) return choi_to_kraus(kraus_to_choi(composed));
  return composed;
}

}  // namespace infsamp
