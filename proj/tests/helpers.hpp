#pragma once

#include <cstdint>

#include "infsamp/process.hpp"
#include "infsamp/random.hpp"

namespace infsamp::testing {

// Haar-like random channel: a Gaussian (rank*d) x d matrix orthonormalized by
// QR gives an isometry whose d x d blocks are Kraus operators.
KrausSet random_channel(int num_qubits, int rank, RandomStream& rng);

// Random pure state on n qubits.
Matrix random_density(int num_qubits, RandomStream& rng);

double frobenius(const Matrix& a, const Matrix& b);

}  // namespace infsamp::testing
