#pragma once

#include <array>

#include "infsamp/process.hpp"
#include "infsamp/qubit_subset.hpp"

namespace infsamp {

// Test gates U_1 = I, U_2 = H, U_3 = R_x(pi/2); the enumerator value is l.
enum class TestGate : int { Identity = 1, Hadamard = 2, RxHalfPi = 3 };

constexpr int gate_index(TestGate g) { return static_cast<int>(g); }
constexpr std::array<TestGate, 3> kAllTestGates{TestGate::Identity, TestGate::Hadamard, TestGate::RxHalfPi};

// (E X_1^S, E X_2^S, E X_3^S), entry l-1 for test gate l.
using SamplerTriple = std::array<double, 3>;

enum class BoundMode { TwoGate, ThreeGate };

struct InfluenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Sum of chi diagonal entries whose Pauli digits on every qubit of S lie in
// `allowed` (a bitmask over digits 0..3).
double restricted_diagonal_sum(const ChiMatrix& chi, QubitSubset s, unsigned allowed_digits);

// Inf_S = 1 - sum_{x : x_S = 0} chi_xx.
double influence_exact(const ChiMatrix& chi, QubitSubset s);

SamplerTriple influence_samplers_exact(const ChiMatrix& chi, QubitSubset s);

// Two-gate: [max(E1,E2), E1+E2]. Three-gate: [max(E1,E2,E3), (E1+E2+E3)/2].
// Both ends are clamped to [0, 1].
InfluenceInterval influence_bounds(const SamplerTriple& samplers, BoundMode mode);

struct InfluenceDiagnostics {
  double o = 0, a = 0, b = 0, c = 0;
  double a_o = 0, b_o = 0, c_o = 0, d = 0;

  // min(A,B) >= O >= A+B-1 and min(A,B,C) >= O >= (A+B+C-1)/2 within `tol`.
  bool satisfies_sampler_inequalities(double tol = 1e-10) const;
};

InfluenceDiagnostics influence_diagnostics(const ChiMatrix& chi, QubitSubset s);

// F = (Tr sqrt(sqrt(A) B sqrt(A)))^2 on process matrices.
double process_fidelity(const ChiMatrix& a, const ChiMatrix& b);

// D = ||chi_a - chi_b||_F / sqrt(2).
double process_distance(const ChiMatrix& a, const ChiMatrix& b);

// Process matrix of rho_S -> Tr_{S^c}[Phi(rho_S (x) I/2^{|S^c|})]. The reduced
// register orders the qubits of S increasingly.
ChiMatrix reduce_subprocess(const ChiMatrix& chi, QubitSubset s);

// Process matrix of Phi_T (x) I_{T^c} on n qubits, where `sub` acts on the
// qubits of T in increasing order. An empty T yields the identity process.
ChiMatrix tensor_with_identity(const ChiMatrix& sub, QubitSubset t, int num_qubits);

// Identity process on n qubits.
ChiMatrix identity_chi(int num_qubits);

}  // namespace infsamp
