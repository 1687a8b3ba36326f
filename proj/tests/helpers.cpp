#include "helpers.hpp"

#include <Eigen/QR>

namespace infsamp::testing {

KrausSet random_channel(int num_qubits, int rank, RandomStream& rng) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  Matrix g(rank * d, d);
  for (Eigen::Index r = 0; r < g.rows(); ++r) {
    for (Eigen::Index c = 0; c < g.cols(); ++c) g(r, c) = Complex(rng.normal(), rng.normal());
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix v = qr.householderQ() * Matrix::Identity(rank * d, d);
  std::vector<Matrix> ops;
  for (int i = 0; i < rank; ++i) ops.push_back(v.block(i * d, 0, d, d));
  return KrausSet(num_qubits, std::move(ops));
}

Matrix random_density(int num_qubits, RandomStream& rng) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << num_qubits);
  Vector psi(d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i) = Complex(rng.normal(), rng.normal());
  psi.normalize();
  return psi * psi.adjoint();
}

double frobenius(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

}  // namespace infsamp::testing
