#include "infsamp/channels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infsamp/errors.hpp"

namespace infsamp {

namespace {

struct KindName {
  GateKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 14> kKindNames{{
    {GateKind::X, "X"},
    {GateKind::Y, "Y"},
    {GateKind::Z, "Z"},
    {GateKind::H, "H"},
    {GateKind::RX, "RX"},
    {GateKind::RY, "RY"},
    {GateKind::RZ, "RZ"},
    {GateKind::US, "US"},
    {GateKind::CNOT, "CNOT"},
    {GateKind::CZ, "CZ"},
    {GateKind::CUS, "CUS"},
    {GateKind::PHASE_DAMP, "PHASE_DAMP"},
    {GateKind::CTRL_PHASE_DAMP, "CTRL_PHASE_DAMP"},
    {GateKind::IDENTITY, "IDENTITY"},
}};

Matrix mat2(Complex a, Complex b, Complex c, Complex d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Matrix us_matrix() {
  const double s = 1.0 / std::sqrt(3.0);
  return mat2(s, Complex(s, -s), Complex(s, s), -s);
}

// |0><0| (x) I + |1><1| (x) u on (control, target).
Matrix controlled(const Matrix& u) {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m.block(2, 2, 2, 2) = u;
  return m;
}

std::vector<Matrix> drop_zero(std::vector<Matrix> ops) {
  std::erase_if(ops, [](const Matrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; });
  return ops;
}

}  // namespace

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::CNOT:
    case GateKind::CZ:
    case GateKind::CUS:
    case GateKind::CTRL_PHASE_DAMP:
      return 2;
    default:
      return 1;
  }
}

std::string_view to_string(GateKind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "?";
}

std::optional<GateKind> parse_gate_kind(std::string_view name) {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  return std::nullopt;
}

void GateSpec::validate(int num_qubits) const {
  const auto label = std::string(to_string(kind));
  if (static_cast<int>(qubits.size()) != gate_arity(kind)) {
    throw ValidationError(label + " acts on " + std::to_string(gate_arity(kind)) + " qubit(s), got " +
                          std::to_string(qubits.size()));
  }
  for (int q : qubits) {
    if (q < 1 || q > num_qubits) {
      throw ValidationError(label + ": qubit " + std::to_string(q) + " outside 1.." + std::to_string(num_qubits));
    }
  }
  if (qubits.size() == 2 && qubits[0] == qubits[1]) throw ValidationError(label + ": qubits must be distinct");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError(label + ": damping rate must lie in [0, 1]");
  if (!std::isfinite(theta) || !std::isfinite(phi)) throw ValidationError(label + ": non-finite parameter");
}

KrausSet build_gate(const GateSpec& spec) {
  if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0)) {
    throw ValidationError(std::string(to_string(spec.kind)) + ": damping rate must lie in [0, 1]");
  }
  const double c = std::cos(spec.theta / 2);
  const double s = std::sin(spec.theta / 2);
  const Complex phase = std::polar(1.0, spec.phi);
  const double keep = std::sqrt(1.0 - spec.lambda);
  const double lose = std::sqrt(spec.lambda);
  switch (spec.kind) {
    case GateKind::IDENTITY:
      return KrausSet::identity(1);
    case GateKind::X:
      return KrausSet(1, {pauli_matrix(1)});
    case GateKind::Y:
      return KrausSet(1, {pauli_matrix(2)});
    case GateKind::Z:
      return KrausSet(1, {pauli_matrix(3)});
    case GateKind::H:
      return KrausSet(1, {test_gate_unitary(TestGate::Hadamard)});
    case GateKind::RX:
      return KrausSet(1, {mat2(c, -kI * s, -kI * s, c)});
    case GateKind::RY:
      return KrausSet(1, {mat2(c, -s, s, c)});
    case GateKind::RZ:
      return KrausSet(1, {mat2(std::polar(1.0, -spec.theta / 2), 0, 0, std::polar(1.0, spec.theta / 2))});
    case GateKind::US:
      return KrausSet(1, {us_matrix()});
    case GateKind::CNOT:
      return KrausSet(2, {controlled(pauli_matrix(1))});
    case GateKind::CZ:
      return KrausSet(2, {controlled(pauli_matrix(3))});
    case GateKind::CUS:
      return KrausSet(2, {controlled(us_matrix())});
    case GateKind::PHASE_DAMP:
      return KrausSet(1, drop_zero({mat2(1, 0, 0, phase * keep), mat2(0, 0, 0, lose)}));
    case GateKind::CTRL_PHASE_DAMP: {
      Matrix k1 = Matrix::Zero(4, 4);
      k1(0, 0) = 1.0;
      k1(1, 1) = 1.0;
      Matrix k2 = Matrix::Zero(4, 4);
      k2(2, 2) = 1.0;
      k2(3, 3) = phase * keep;
      Matrix k3 = Matrix::Zero(4, 4);
      k3(3, 3) = lose;
      return KrausSet(2, drop_zero({k1, k2, k3}));
    }
  }
  throw ValidationError("unknown gate kind");
}

void ProcessSpec::validate() const {
  if (num_qubits < 1 || num_qubits > kMaxQubits) {
    throw ValidationError("process qubit count must be in 1.." + std::to_string(kMaxQubits));
  }
  for (const auto& g : layers) g.validate(num_qubits);
}

QubitSubset ProcessSpec::support() const {
  QubitSubset s;
  for (const auto& g : layers) {
    if (g.kind != GateKind::IDENTITY) s = s | QubitSubset::from_qubits(g.qubits);
  }
  return s;
}

JuntaView::JuntaView(int num_qubits, QubitSubset support, KrausSet kraus)
    : num_qubits_(num_qubits), support_(support), kraus_(std::move(kraus)) {
  if (num_qubits_ < 1 || num_qubits_ > kMaxQubits) throw ValidationError("JuntaView: qubit count out of range");
  if (support_.max_qubit() > num_qubits_) throw ValidationError("JuntaView: support exceeds register");
  if (kraus_.num_qubits() != support_.size()) throw ValidationError("JuntaView: Kraus size != |support|");
}

JuntaView JuntaView::from_chi(const ChiMatrix& chi) {
  return JuntaView(chi.num_qubits(), QubitSubset::full(chi.num_qubits()), chi_to_kraus(chi));
}

ChiMatrix JuntaView::support_chi() const { return choi_to_chi(kraus_to_choi(kraus_)); }

namespace {

// Composes the non-identity layers on a register whose qubit j (0-based)
// is global qubit register[j].
KrausSet compose_on_register(const ProcessSpec& spec, const std::vector<int>& reg) {
  const int m = static_cast<int>(reg.size());
  KrausSet acc = KrausSet::identity(m);
  for (const auto& g : spec.layers) {
    if (g.kind == GateKind::IDENTITY) continue;
    std::vector<int> positions;
    for (int q : g.qubits) {
      positions.push_back(static_cast<int>(std::find(reg.begin(), reg.end(), q) - reg.begin()));
    }
    const KrausSet local = build_gate(g);
    std::vector<Matrix> ops;
    for (const auto& k : local.operators()) ops.push_back(embed_operator(k, positions, m));
    acc = compose(acc, KrausSet(m, std::move(ops)));
  }
  return acc;
}

}  // namespace

JuntaView embed_junta(const ProcessSpec& spec) {
  spec.validate();
  const QubitSubset support = spec.support();
  return JuntaView(spec.num_qubits, support, compose_on_register(spec, support.qubits()));
}

KrausSet embed_dense_kraus(const ProcessSpec& spec, int max_qubits) {
  spec.validate();
  if (spec.num_qubits > max_qubits) {
    throw SizeError("dense embedding of " + std::to_string(spec.num_qubits) + " qubits exceeds cap of " +
                    std::to_string(max_qubits));
  }
  std::vector<int> reg(static_cast<std::size_t>(spec.num_qubits));
  for (int q = 1; q <= spec.num_qubits; ++q) reg[static_cast<std::size_t>(q - 1)] = q;
  return compose_on_register(spec, reg);
}

ChiMatrix embed_dense(const ProcessSpec& spec, int max_qubits) {
  return choi_to_chi(kraus_to_choi(embed_dense_kraus(spec, max_qubits)));
}

const Matrix& test_gate_unitary(TestGate gate) {
  static const std::array<Matrix, 3> gates = [] {
    const double r = 1.0 / std::numbers::sqrt2;
    return std::array<Matrix, 3>{mat2(1, 0, 0, 1), mat2(r, r, r, -r), mat2(r, -kI * r, -kI * r, r)};
  }();
  return gates[static_cast<std::size_t>(gate_index(gate) - 1)];
}

NoiseModel NoiseModel::spam(std::optional<QubitSubset> qubits) {
  NoiseModel m;
  m.flip = kSpamDefaults;
  m.flip_qubits = qubits;
  return m;
}

NoiseModel NoiseModel::spam_even_qubits(int num_qubits) {
  QubitSubset even;
  for (int q = 2; q <= num_qubits; q += 2) even = even | QubitSubset::of({q});
  return spam(even);
}

QubitSubset NoiseModel::noisy_qubits(int num_qubits) const {
  const QubitSubset all = QubitSubset::full(num_qubits);
  return flip_qubits ? (*flip_qubits & all) : all;
}

void NoiseModel::validate() const {
  for (double p : flip) {
    if (!(p >= 0.0 && p <= 0.5)) throw ValidationError("flip probabilities must lie in [0, 0.5]");
  }
  if (!(gate_jitter >= 0.0) || !std::isfinite(gate_jitter)) {
    throw ValidationError("gate jitter must be a finite non-negative angle");
  }
}

}  // namespace infsamp
