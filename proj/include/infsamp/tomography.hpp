#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "infsamp/channels.hpp"
#include "infsamp/inference.hpp"
#include "infsamp/process.hpp"
#include "infsamp/qubit_subset.hpp"
#include "infsamp/sampler.hpp"

namespace infsamp {

inline constexpr int kDefaultTomographyCap = 2;

// Single-qubit inputs: the +1/-1 eigenstates of Z, X and Y.
enum class InputState { ZPlus, ZMinus, XPlus, XMinus, YPlus, YMinus };
enum class MeasurementBasis { X, Y, Z };

std::string to_string(InputState s);
std::string to_string(MeasurementBasis b);

// Density matrix of an input state, and the unitary that rotates a
// measurement basis onto the computational basis (outcome 0 = +1 eigenvalue).
Matrix input_density(InputState s);
Matrix basis_rotation(MeasurementBasis b);

// One input state and one basis per qubit of T, in increasing qubit order.
struct TomographySetting {
  std::vector<InputState> inputs;
  std::vector<MeasurementBasis> bases;

  std::string input_label() const;  // e.g. "0,+i"
  std::string basis_label() const;  // e.g. "XZ"
};

// All 6^t x 3^t settings; the input index is the major key.
std::vector<TomographySetting> tomography_settings(int num_qubits);

struct TomographyData {
  QubitSubset t;
  std::vector<TomographySetting> settings;
  // Per setting, over the 2^t outcomes (lowest qubit most significant).
  std::vector<std::vector<double>> frequencies;
  std::vector<std::vector<std::uint64_t>> counts;  // empty for exact data
  std::uint64_t shots_per_setting = 0;             // 0 for exact data
};

struct TomographyOptions {
  std::uint64_t shots_per_setting = 10000;
  std::uint64_t seed = 0;
  int workers = 1;
  int max_qubits = kDefaultTomographyCap;
};

// Inputs rho_T (x) I/2^{|T^c|} through the process, T measured in each
// setting's product basis, flip noise on the noisy qubits of T with the rate
// of the matching test gate (Z basis: gate 1, X: gate 2, Y: gate 3).
TomographyData generate_tomography_data(const JuntaView& view, QubitSubset t, const NoiseModel& noise,
                                        const TomographyOptions& options);
// Infinite-statistics limit of the same experiment.
TomographyData exact_tomography_data(const JuntaView& view, QubitSubset t, const NoiseModel& noise,
                                     int max_qubits = kDefaultTomographyCap);

// Choi matrix of Phi_T(rho) = Tr_{T^c}[Phi(rho (x) I/2^{|T^c|})].
ChoiMatrix exact_subprocess_choi(const JuntaView& view, QubitSubset t, int max_qubits = kDefaultTomographyCap);

struct ProjectionOptions {
  double tolerance = 1e-10;
  int max_iterations = 1000;
};

struct ReconstructionResult {
  ChoiMatrix choi;
  ChiMatrix chi;
  int iterations = 0;
  double min_eigenvalue = 0.0;
  double tp_deviation = 0.0;
  std::optional<double> distance;  // vs reference, when supplied
  std::optional<double> fidelity;
};

// Alternating (Dykstra) projection onto PSD matrices with Tr_out J = I,
// followed by the smallest mixing with I/D that removes residual negative
// eigenvalues. `j` is any Hermitian D^2 x D^2 matrix.
Matrix project_cptp(const Matrix& j, int num_qubits, const ProjectionOptions& options, int* iterations = nullptr);

// Linear-inversion least squares on the frequencies, then project_cptp.
ReconstructionResult reconstruct_cptp(const TomographyData& data, const ProjectionOptions& options = {});
void compare_to_reference(ReconstructionResult& result, const ChiMatrix& reference);

struct LearnerOutput {
  HiqiResult hiqi;
  QubitSubset t;
  std::optional<ReconstructionResult> reconstruction;  // empty when T is empty
  EpsilonEstimate epsilon;
  std::optional<double> epsilon_r;
  std::optional<double> total_bound;
};

// HIQI followed by tomography of Phi_T. With `with_reference`, epsilon_r is
// measured against the exact sub-process.
LearnerOutput junta_learner(const InfluenceSampler& sampler, const SamplerConfig& config, double delta,
                            const TomographyOptions& tomography, bool with_reference = true);

}  // namespace infsamp
