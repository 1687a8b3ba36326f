#include "infsamp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "infsamp/errors.hpp"

namespace infsamp {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double hermiticity_defect(const Matrix& a) {
  if (a.rows() != a.cols()) return INFINITY;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

RealVector hermitian_eigenvalues(const Matrix& a) {
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Matrix psd_sqrt(const Matrix& a) {
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix project_psd(const Matrix& a) {
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  const RealVector clipped = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * clipped.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix trace_first(const Matrix& a, std::size_t d_first, std::size_t d_second) {
  const auto n1 = static_cast<Eigen::Index>(d_first);
  const auto n2 = static_cast<Eigen::Index>(d_second);
  Matrix out = Matrix::Zero(n2, n2);
  for (Eigen::Index k = 0; k < n1; ++k) out += a.block(k * n2, k * n2, n2, n2);
  return out;
}

Matrix trace_second(const Matrix& a, std::size_t d_first, std::size_t d_second) {
  const auto n1 = static_cast<Eigen::Index>(d_first);
  const auto n2 = static_cast<Eigen::Index>(d_second);
  Matrix out = Matrix::Zero(n1, n1);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = 0; j < n1; ++j) {
      out(i, j) = a.block(i * n2, j * n2, n2, n2).trace();
    }
  }
  return out;
}

Matrix embed_operator(const Matrix& op, std::span<const int> positions, int register_size) {
  const int g = static_cast<int>(positions.size());
  if (op.rows() != (Eigen::Index{1} << g) || op.cols() != op.rows()) {
    throw ValidationError("embed_operator: operator size does not match qubit count");
  }
  for (int p : positions) {
    if (p < 0 || p >= register_size) throw ValidationError("embed_operator: position out of range");
  }
  const std::size_t dim = std::size_t{1} << register_size;
  const std::size_t sub = std::size_t{1} << g;

  // bit of the full index carrying local qubit j
  std::vector<int> bit(g);
  std::uint64_t touched = 0;
  for (int j = 0; j < g; ++j) {
    bit[j] = register_size - 1 - positions[j];
    touched |= std::uint64_t{1} << bit[j];
  }
  auto local_of = [&](std::size_t full) {
    std::size_t local = 0;
    for (int j = 0; j < g; ++j) local |= ((full >> bit[j]) & 1U) << (g - 1 - j);
    return local;
  };
  auto scatter = [&](std::size_t base, std::size_t local) {
    std::size_t full = base;
    for (int j = 0; j < g; ++j) full |= ((local >> (g - 1 - j)) & 1U) << bit[j];
    return full;
  };

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t col = 0; col < dim; ++col) {
    const std::size_t base = col & ~touched;
    const std::size_t lc = local_of(col);
    for (std::size_t lr = 0; lr < sub; ++lr) {
      const Complex v = op(static_cast<Eigen::Index>(lr), static_cast<Eigen::Index>(lc));
      if (v != Complex{0.0, 0.0}) {
        out(static_cast<Eigen::Index>(scatter(base, lr)), static_cast<Eigen::Index>(col)) = v;
      }
    }
  }
  return out;
}

}  // namespace infsamp
