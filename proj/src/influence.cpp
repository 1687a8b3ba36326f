#include "infsamp/influence.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "infsamp/errors.hpp"
#include "infsamp/pauli.hpp"

namespace infsamp {

namespace {

constexpr unsigned digit_bit(int d) { return 1U << d; }
constexpr unsigned kOnlyIdentity = digit_bit(0);
constexpr unsigned kIdentityOrZ = digit_bit(0) | digit_bit(3);
constexpr unsigned kIdentityOrX = digit_bit(0) | digit_bit(1);
constexpr unsigned kIdentityOrY = digit_bit(0) | digit_bit(2);

void require_within(const ChiMatrix& chi, QubitSubset s) {
  if (s.max_qubit() > chi.num_qubits()) {
    throw ValidationError("subset " + s.to_string() + " exceeds the process's " +
                          std::to_string(chi.num_qubits()) + " qubits");
  }
}

// Flat-index offsets of every digit assignment to `qubits` (in list order,
// first qubit most significant within the local index).
std::vector<std::uint64_t> digit_offsets(const std::vector<int>& qubits, int num_qubits) {
  const std::size_t m = qubits.size();
  std::vector<std::uint64_t> out(std::size_t{1} << (2 * m));
  for (std::uint64_t local = 0; local < out.size(); ++local) {
    std::uint64_t full = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::uint64_t digit = (local >> (2 * (m - 1 - j))) & 3U;
      full |= digit << (2 * (num_qubits - qubits[j]));
    }
    out[local] = full;
  }
  return out;
}

void check_same_size(const ChiMatrix& a, const ChiMatrix& b, const char* what) {
  if (a.num_qubits() != b.num_qubits()) throw ValidationError(std::string(what) + ": qubit counts differ");
}

}  // namespace

double restricted_diagonal_sum(const ChiMatrix& chi, QubitSubset s, unsigned allowed_digits) {
  require_within(chi, s);
  const int n = chi.num_qubits();
  const auto qubits = s.qubits();
  const auto& e = chi.entries();
  double total = 0.0;
  for (Eigen::Index x = 0; x < e.rows(); ++x) {
    bool keep = true;
    for (int q : qubits) {
      if ((allowed_digits & digit_bit(pauli_digit(static_cast<std::uint64_t>(x), n, q))) == 0) {
        keep = false;
        break;
      }
    }
    if (keep) total += e(x, x).real();
  }
  return total;
}

namespace {

// 1 - restricted_diagonal_sum(chi, s, allowed), summed directly over the
// excluded entries so small values do not suffer cancellation.
double excluded_diagonal_sum(const ChiMatrix& chi, QubitSubset s, unsigned allowed_digits) {
  require_within(chi, s);
  const int n = chi.num_qubits();
  const auto qubits = s.qubits();
  const auto& e = chi.entries();
  double total = 0.0;
  for (Eigen::Index x = 0; x < e.rows(); ++x) {
    for (int q : qubits) {
      if ((allowed_digits & digit_bit(pauli_digit(static_cast<std::uint64_t>(x), n, q))) == 0) {
        total += e(x, x).real();
        break;
      }
    }
  }
  return std::clamp(total, 0.0, 1.0);
}

}  // namespace

double influence_exact(const ChiMatrix& chi, QubitSubset s) { return excluded_diagonal_sum(chi, s, kOnlyIdentity); }

SamplerTriple influence_samplers_exact(const ChiMatrix& chi, QubitSubset s) {
  auto sampler = [&](unsigned allowed) { return excluded_diagonal_sum(chi, s, allowed); };
  return {sampler(kIdentityOrZ), sampler(kIdentityOrX), sampler(kIdentityOrY)};
}

InfluenceInterval influence_bounds(const SamplerTriple& e, BoundMode mode) {
  for (double v : e) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) throw ValidationError("influence_bounds: sampler outside [0,1]");
  }
  InfluenceInterval out;
  if (mode == BoundMode::TwoGate) {
    out.lower = std::max(e[0], e[1]);
    out.upper = e[0] + e[1];
  } else {
    out.lower = std::max({e[0], e[1], e[2]});
    out.upper = 0.5 * (e[0] + e[1] + e[2]);
  }
  out.lower = std::clamp(out.lower, 0.0, 1.0);
  out.upper = std::clamp(out.upper, 0.0, 1.0);
  return out;
}

bool InfluenceDiagnostics::satisfies_sampler_inequalities(double tol) const {
  return std::min(a, b) >= o - tol && o >= a + b - 1.0 - tol && std::min({a, b, c}) >= o - tol &&
         o >= 0.5 * (a + b + c - 1.0) - tol;
}

InfluenceDiagnostics influence_diagnostics(const ChiMatrix& chi, QubitSubset s) {
  if (s.empty()) throw ValidationError("influence_diagnostics: subset must be non-empty");
  InfluenceDiagnostics g;
  g.o = restricted_diagonal_sum(chi, s, kOnlyIdentity);
  g.a = restricted_diagonal_sum(chi, s, kIdentityOrZ);
  g.b = restricted_diagonal_sum(chi, s, kIdentityOrX);
  g.c = restricted_diagonal_sum(chi, s, kIdentityOrY);
  g.a_o = g.a - g.o;
  g.b_o = g.b - g.o;
  g.c_o = g.c - g.o;
  g.d = 1.0 - (g.o + g.a_o + g.b_o + g.c_o);
  return g;
}

double process_fidelity(const ChiMatrix& a, const ChiMatrix& b) {
  check_same_size(a, b, "process_fidelity");
  // Tr sqrt(sqrt(A) B sqrt(A)) is the nuclear norm of sqrt(A) sqrt(B); the
  // singular values avoid square roots of round-off eigenvalues.
  const Matrix product = psd_sqrt(a.entries()) * psd_sqrt(b.entries());
  const double tr = Eigen::JacobiSVD<Matrix>(product).singularValues().sum();
  return std::clamp(tr * tr, 0.0, 1.0);
}

double process_distance(const ChiMatrix& a, const ChiMatrix& b) {
  check_same_size(a, b, "process_distance");
  return (a.entries() - b.entries()).norm() / std::sqrt(2.0);
}

ChiMatrix reduce_subprocess(const ChiMatrix& chi, QubitSubset s) {
  if (s.empty()) throw ValidationError("reduce_subprocess: subset must be non-empty");
  require_within(chi, s);
  const int n = chi.num_qubits();
  const auto kept = digit_offsets(s.qubits(), n);
  const auto traced = digit_offsets(s.complement(n).qubits(), n);
  const auto size = static_cast<Eigen::Index>(kept.size());
  const auto& e = chi.entries();
  Matrix out = Matrix::Zero(size, size);
  for (Eigen::Index x = 0; x < size; ++x) {
    for (Eigen::Index y = 0; y < size; ++y) {
      Complex acc{};
      for (std::uint64_t z : traced) {
        acc += e(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(x)] | z),
                 static_cast<Eigen::Index>(kept[static_cast<std::size_t>(y)] | z));
      }
      out(x, y) = acc;
    }
  }
  return ChiMatrix(s.size(), std::move(out));
}

ChiMatrix tensor_with_identity(const ChiMatrix& sub, QubitSubset t, int num_qubits) {
  if (sub.num_qubits() != t.size()) throw ValidationError("tensor_with_identity: sub-process size != |T|");
  if (t.max_qubit() > num_qubits) throw ValidationError("tensor_with_identity: T exceeds register");
  if (num_qubits > kDefaultDenseQubitCap) throw SizeError("tensor_with_identity: register exceeds dense cap");
  const auto offsets = digit_offsets(t.qubits(), num_qubits);
  const auto size = static_cast<Eigen::Index>(std::size_t{1} << (2 * num_qubits));
  Matrix out = Matrix::Zero(size, size);
  const auto& e = sub.entries();
  for (Eigen::Index x = 0; x < e.rows(); ++x) {
    for (Eigen::Index y = 0; y < e.cols(); ++y) {
      out(static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(x)]),
          static_cast<Eigen::Index>(offsets[static_cast<std::size_t>(y)])) = e(x, y);
    }
  }
  return ChiMatrix(num_qubits, std::move(out));
}

ChiMatrix identity_chi(int num_qubits) {
  const auto size = static_cast<Eigen::Index>(std::size_t{1} << (2 * num_qubits));
  Matrix m = Matrix::Zero(size, size);
  m(0, 0) = 1.0;
  return ChiMatrix(num_qubits, std::move(m));
}

}  // namespace infsamp
