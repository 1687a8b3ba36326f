#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infsamp/influence.hpp"
#include "infsamp/pauli.hpp"
#include "infsamp/process.hpp"
#include "infsamp/qubit_subset.hpp"

namespace infsamp {

enum class GateKind {
  X,
  Y,
  Z,
  H,
  RX,
  RY,
  RZ,
  US,
  CNOT,
  CZ,
  CUS,
  PHASE_DAMP,
  CTRL_PHASE_DAMP,
  IDENTITY,
};

int gate_arity(GateKind kind);
std::string_view to_string(GateKind kind);
std::optional<GateKind> parse_gate_kind(std::string_view name);

// One gate or channel placed on specific qubits. Two-qubit kinds list their
// qubits as (control, target).
struct GateSpec {
  GateKind kind = GateKind::IDENTITY;
  std::vector<int> qubits;
  double theta = 0.0;   // rotation angle (RX, RY, RZ)
  double lambda = 0.0;  // damping rate in [0, 1]
  double phi = 0.0;     // damping phase

  // Arity, distinct in-range qubits (1..num_qubits) and parameter ranges.
  void validate(int num_qubits) const;
};

// The gate's own Kraus operators on 1 or 2 qubits. Zero operators are dropped,
// so unitary kinds and zero damping yield a single operator.
KrausSet build_gate(const GateSpec& spec);

// Layers compose left to right: the first listed acts first on the state.
struct ProcessSpec {
  int num_qubits = 1;
  std::vector<GateSpec> layers;

  void validate() const;
  // Qubits touched by any non-IDENTITY layer.
  QubitSubset support() const;
};

// A process given by its action on a support set; identity elsewhere. Works
// for any n up to 64 since only the support is stored densely.
class JuntaView {
 public:
  JuntaView(int num_qubits, QubitSubset support, KrausSet kraus);

  static JuntaView from_chi(const ChiMatrix& chi);

  int num_qubits() const { return num_qubits_; }
  QubitSubset support() const { return support_; }
  // Operators on the support register, qubits in increasing order.
  const KrausSet& kraus() const { return kraus_; }
  // Process matrix of the support sub-process.
  ChiMatrix support_chi() const;

 private:
  int num_qubits_;
  QubitSubset support_;
  KrausSet kraus_;
};

JuntaView embed_junta(const ProcessSpec& spec);

// Full n-qubit Kraus set and process matrix; refused above `max_qubits`.
KrausSet embed_dense_kraus(const ProcessSpec& spec, int max_qubits = kDefaultDenseQubitCap);
ChiMatrix embed_dense(const ProcessSpec& spec, int max_qubits = kDefaultDenseQubitCap);

// U_l as a 2x2 matrix.
const Matrix& test_gate_unitary(TestGate gate);

// Classical measurement flips applied after the ideal computational-basis
// outcome: each qubit in the noisy set flips independently with the
// probability assigned to the test gate in use. Optional angle jitter
// perturbs every test gate as U_l R_x(eta), eta ~ N(0, gate_jitter^2),
// drawn independently for preparation and inversion.
struct NoiseModel {
  std::array<double, 3> flip{0.0, 0.0, 0.0};
  std::optional<QubitSubset> flip_qubits;  // nullopt: every qubit
  double gate_jitter = 0.0;

  static constexpr std::array<double, 3> kSpamDefaults{0.0005, 0.005, 0.005};

  static NoiseModel noiseless() { return {}; }
  // Default SPAM flip rates on every qubit.
  static NoiseModel spam(std::optional<QubitSubset> qubits = std::nullopt);
  // Default SPAM flip rates on the interferometric (even-numbered) qubits of
  // an n-qubit register: qubits 2, 4, ...
  static NoiseModel spam_even_qubits(int num_qubits);

  double flip_probability(TestGate gate) const { return flip[static_cast<std::size_t>(gate_index(gate) - 1)]; }
  QubitSubset noisy_qubits(int num_qubits) const;
  bool has_flips() const { return flip[0] > 0 || flip[1] > 0 || flip[2] > 0; }
  void validate() const;
};

}  // namespace infsamp
