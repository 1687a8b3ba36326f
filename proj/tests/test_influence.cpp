#include "doctest.h"

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "infsamp/errors.hpp"
#include "infsamp/influence.hpp"
#include "infsamp/pauli.hpp"

using namespace infsamp;

namespace {

ChiMatrix chi_of(int n, const Matrix& u) { return kraus_to_chi(KrausSet(n, {u})); }

Matrix cnot_matrix() {
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

Matrix rotation(int axis, double theta) {
  return std::cos(theta / 2) * Matrix::Identity(2, 2) - kI * std::sin(theta / 2) * pauli_matrix(axis);
}

// Choi-based oracle for rho_S -> Tr_rest[Phi(rho_S (x) I/2^m)] when S holds
// the leading qubits.
ChiMatrix leading_reduction(const KrausSet& k, int s_qubits) {
  const std::size_t ds = std::size_t{1} << s_qubits;
  const std::size_t dm = k.dim() / ds;
  const auto d = static_cast<Eigen::Index>(ds);
  const Matrix mixed = Matrix::Identity(static_cast<Eigen::Index>(dm), static_cast<Eigen::Index>(dm)) /
                       static_cast<double>(dm);
  Matrix j = Matrix::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      Matrix unit = Matrix::Zero(d, d);
      unit(a, b) = 1.0;
      j += kron(trace_second(apply_process(k, kron(unit, mixed)), ds, dm), unit);
    }
  }
  return choi_to_chi(ChoiMatrix(s_qubits, j));
}

}  // namespace

TEST_CASE("identity process has zero influence everywhere") {
  const auto chi = identity_chi(3);
  for (auto s : all_subsets(3)) {
    CHECK(influence_exact(chi, s) == 0.0);
    const auto e = influence_samplers_exact(chi, s);
    CHECK(e[0] == 0.0);
    CHECK(e[1] == 0.0);
    CHECK(e[2] == 0.0);
  }
}

TEST_CASE("CNOT influences and samplers") {
  const auto chi = chi_of(2, cnot_matrix());
  CHECK(influence_exact(chi, QubitSubset::of({1})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(influence_exact(chi, QubitSubset::of({2})) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(influence_exact(chi, QubitSubset::of({1, 2})) == doctest::Approx(0.75).epsilon(1e-12));

  const auto e1 = influence_samplers_exact(chi, QubitSubset::of({1}));
  CHECK(std::abs(e1[0]) < 1e-12);
  CHECK(std::abs(e1[1] - 0.5) < 1e-12);
  CHECK(std::abs(e1[2] - 0.5) < 1e-12);
  const auto e12 = influence_samplers_exact(chi, QubitSubset::of({1, 2}));
  CHECK(std::abs(e12[0] - 0.5) < 1e-12);
  CHECK(std::abs(e12[1] - 0.5) < 1e-12);
  CHECK(std::abs(e12[2] - 0.75) < 1e-12);

  const auto two = influence_bounds(e12, BoundMode::TwoGate);
  CHECK(std::abs(two.lower - 0.5) < 1e-12);
  CHECK(std::abs(two.upper - 1.0) < 1e-12);
  const auto three = influence_bounds(e12, BoundMode::ThreeGate);
  CHECK(std::abs(three.lower - 0.75) < 1e-12);
  CHECK(std::abs(three.upper - 0.875) < 1e-12);
}

TEST_CASE("rotation influence is sin^2(theta/2)") {
  for (int axis = 1; axis <= 3; ++axis) {
    for (double theta : {0.0, 0.3, 1.1, std::numbers::pi / 2, 2.5, std::numbers::pi}) {
      const auto chi = chi_of(1, rotation(axis, theta));
      const double s2 = std::pow(std::sin(theta / 2), 2);
      CHECK(std::abs(influence_exact(chi, QubitSubset::of({1})) - s2) < 1e-12);
    }
  }
  const auto rx = influence_samplers_exact(chi_of(1, rotation(1, 1.3)), QubitSubset::of({1}));
  const double s2 = std::pow(std::sin(0.65), 2);
  CHECK(std::abs(rx[0] - s2) < 1e-12);
  CHECK(std::abs(rx[1]) < 1e-12);
  CHECK(std::abs(rx[2] - s2) < 1e-12);
}

TEST_CASE("U_s has unit influence and samplers 2/3") {
  const Matrix us = (pauli_matrix(1) + pauli_matrix(2) + pauli_matrix(3)) / std::sqrt(3.0);
  const auto chi = chi_of(1, us);
  const auto s = QubitSubset::of({1});
  CHECK(std::abs(influence_exact(chi, s) - 1.0) < 1e-12);
  for (double e : influence_samplers_exact(chi, s)) CHECK(std::abs(e - 2.0 / 3.0) < 1e-12);
  const auto g = influence_diagnostics(chi, s);
  CHECK(std::abs(g.o) < 1e-12);
  CHECK(std::abs(g.a - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(g.b - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(g.c - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(g.d) < 1e-12);
}

TEST_CASE("full phase damping samplers") {
  Matrix k1 = Matrix::Zero(2, 2);
  k1(0, 0) = 1.0;
  Matrix k2 = Matrix::Zero(2, 2);
  k2(1, 1) = 1.0;
  const auto chi = kraus_to_chi(KrausSet(1, {k1, k2}));
  const auto e = influence_samplers_exact(chi, QubitSubset::of({1}));
  CHECK(std::abs(e[0]) < 1e-12);
  CHECK(std::abs(e[1] - 0.5) < 1e-12);
  CHECK(std::abs(e[2] - 0.5) < 1e-12);
}

TEST_CASE("diagnostics examples") {
  const auto id = influence_diagnostics(identity_chi(2), QubitSubset::of({1, 2}));
  CHECK(id.o == 1.0);
  CHECK(id.a == 1.0);
  CHECK(id.d == 0.0);
  const auto g = influence_diagnostics(chi_of(2, cnot_matrix()), QubitSubset::of({1, 2}));
  CHECK(std::abs(g.o - 0.25) < 1e-12);
  CHECK(std::abs(g.a - 0.5) < 1e-12);
  CHECK(std::abs(g.b - 0.5) < 1e-12);
  CHECK(std::abs(g.c - 0.25) < 1e-12);
  CHECK(std::abs(g.d - 0.25) < 1e-12);
  CHECK_THROWS_AS(influence_diagnostics(identity_chi(1), QubitSubset{}), ValidationError);
}

TEST_CASE("reduce_subprocess examples") {
  const auto chi = chi_of(2, cnot_matrix());
  const RealVector control = reduce_subprocess(chi, QubitSubset::of({1})).diagonal();
  CHECK(std::abs(control(0) - 0.5) < 1e-12);
  CHECK(std::abs(control(3) - 0.5) < 1e-12);
  const RealVector target = reduce_subprocess(chi, QubitSubset::of({2})).diagonal();
  CHECK(std::abs(target(0) - 0.5) < 1e-12);
  CHECK(std::abs(target(1) - 0.5) < 1e-12);
  CHECK_THROWS_AS(reduce_subprocess(chi, QubitSubset{}), ValidationError);

  RandomStream rng(17, 0);
  const auto sub = kraus_to_chi(testing::random_channel(1, 2, rng));
  const auto embedded = tensor_with_identity(sub, QubitSubset::of({2}), 3);
  CHECK(testing::frobenius(reduce_subprocess(embedded, QubitSubset::of({2})).entries(), sub.entries()) < 1e-12);
}

TEST_CASE("reduce_subprocess matches direct simulation") {
  RandomStream rng(31, 0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto k = testing::random_channel(3, 2, rng);
    const auto chi = kraus_to_chi(k);
    for (int s = 1; s <= 2; ++s) {
      const auto direct = leading_reduction(k, s);
      const auto reduced = reduce_subprocess(chi, QubitSubset::full(s));
      CHECK(testing::frobenius(direct.entries(), reduced.entries()) < 1e-10);
    }
  }
}

TEST_CASE("fidelity and distance examples") {
  const auto id = identity_chi(1);
  const auto x = chi_of(1, pauli_matrix(1));
  CHECK(process_fidelity(id, id) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(process_fidelity(id, x) < 1e-12);
  CHECK(process_distance(id, id) == 0.0);
  CHECK(std::abs(process_distance(id, x) - 1.0) < 1e-12);
  for (double theta : {0.2, 1.0, 2.0, 3.0}) {
    const auto r = chi_of(1, rotation(1, theta));
    CHECK(std::abs(process_distance(id, r) - std::abs(std::sin(theta / 2))) < 1e-12);
    CHECK(std::abs(process_distance(id, r) - std::sqrt(1 - process_fidelity(id, r))) < 1e-7);
  }
  RandomStream rng(4, 4);
  const auto a = kraus_to_chi(testing::random_channel(2, 2, rng));
  const auto b = kraus_to_chi(testing::random_channel(2, 3, rng));
  CHECK(std::abs(process_fidelity(a, a) - 1.0) < 1e-9);
  CHECK(std::abs(process_fidelity(a, b) - process_fidelity(b, a)) < 1e-9);
}

TEST_CASE("properties on random channels") {
  RandomStream rng(123, 0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 1 + trial % 3;
    const auto chi = kraus_to_chi(testing::random_channel(n, 1 + trial % 4, rng));
    const auto subsets = all_subsets(n);
    for (auto s : subsets) {
      if (s.empty()) continue;
      const double inf = influence_exact(chi, s);
      const auto e = influence_samplers_exact(chi, s);
      const auto two = influence_bounds(e, BoundMode::TwoGate);
      const auto three = influence_bounds(e, BoundMode::ThreeGate);
      CHECK(two.lower <= three.lower + 1e-10);
      CHECK(three.lower <= inf + 1e-10);
      CHECK(inf <= three.upper + 1e-10);
      CHECK(three.upper <= two.upper + 1e-10);
      if (s.size() == 1) CHECK(std::abs(three.upper - inf) < 1e-10);

      const auto g = influence_diagnostics(chi, s);
      CHECK(std::abs(g.o + g.a_o + g.b_o + g.c_o + g.d - 1.0) < 1e-10);
      for (double v : {g.o, g.a, g.b, g.c, g.a_o, g.b_o, g.c_o, g.d}) CHECK(v > -1e-10);
      CHECK(g.satisfies_sampler_inequalities());

      const double fid = process_fidelity(reduce_subprocess(chi, s), identity_chi(s.size()));
      CHECK(std::abs(inf - (1.0 - fid)) < 1e-10);

      for (auto t : subsets) {
        if (s.is_subset_of(t)) CHECK(inf <= influence_exact(chi, t) + 1e-12);
        CHECK(influence_exact(chi, s | t) <= inf + influence_exact(chi, t) + 1e-12);
      }
    }
  }
}

TEST_CASE("planted junta has zero influence off its support") {
  RandomStream rng(8, 8);
  const auto sub = kraus_to_chi(testing::random_channel(2, 3, rng));
  const auto t = QubitSubset::of({1, 3});
  const auto chi = tensor_with_identity(sub, t, 4);
  CHECK(influence_exact(chi, t.complement(4)) == 0.0);
  CHECK(influence_exact(chi, QubitSubset::of({2})) == 0.0);
}

TEST_CASE("unitary generator law") {
  // H = cos(a) X(x)Z + sin(a) Y(x)I squares to the identity.
  const double alpha = 0.4;
  const Matrix h = std::cos(alpha) * kron(pauli_matrix(1), pauli_matrix(3)) +
                   std::sin(alpha) * kron(pauli_matrix(2), Matrix::Identity(2, 2));
  REQUIRE(testing::frobenius(h * h, Matrix::Identity(4, 4)) < 1e-12);
  for (double theta : {0.1, 0.7, 1.4, 2.9}) {
    const Matrix u = std::cos(theta) * Matrix::Identity(4, 4) - kI * std::sin(theta) * h;
    const auto chi = chi_of(2, u);
    CHECK(std::abs(influence_exact(chi, QubitSubset::full(2)) - std::pow(std::sin(theta), 2)) < 1e-12);
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(influence_exact(identity_chi(2), QubitSubset::of({3})), ValidationError);
  CHECK_THROWS_AS(influence_bounds({1.5, 0.0, 0.0}, BoundMode::TwoGate), ValidationError);
  CHECK_THROWS_AS(process_distance(identity_chi(1), identity_chi(2)), ValidationError);
  const auto zero = influence_bounds({0.0, 0.0, 0.0}, BoundMode::TwoGate);
  CHECK(zero.lower == 0.0);
  CHECK(zero.upper == 0.0);
}
