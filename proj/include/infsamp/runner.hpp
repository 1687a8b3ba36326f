#pragma once

#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "infsamp/channels.hpp"
#include "infsamp/sampler.hpp"

namespace infsamp::runner {

using json = nlohmann::json;

inline constexpr const char* kSchema = "infsamp.result";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kInternal = 1, kConfigError = 2, kCapabilityError = 3, kResourceError = 4 };

struct SweepConfig {
  std::size_t layer = 0;
  std::string param = "theta";  // theta | lambda | phi
  double start = 0.0;
  double stop = 0.0;
  int steps = 1;
  std::string mode = "exact";  // exact | sampled | both
};

// Flat experiment description. Every key is optional except `process`;
// unknown keys are rejected.
struct ExperimentConfig {
  ProcessSpec process;
  NoiseModel noise;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::uint64_t shots = 260000;
  double delta = 0.006;
  std::optional<int> k;
  GateSet gates = GateSet::Two;
  bool marginals_only = false;
  std::uint64_t shots_per_setting = 10000;
  int tomography_max_qubits = 2;
  std::vector<QubitSubset> subsets;  // empty: command default
  bool cross_check = false;
  bool reference = true;
  std::uint64_t max_distinct_subsets = std::uint64_t{1} << 22;
  std::optional<SweepConfig> sweep;
  std::string out;              // empty: stdout
  std::string format = "json";  // json | csv
};

ExperimentConfig parse_config(const json& j);
json to_json(const ExperimentConfig& config);

const std::vector<std::string>& command_names();

// Deterministic results payload of one command.
json run_command(std::string_view command, const ExperimentConfig& config);

// Full envelope: schema header, resolved config, results, versions,
// wall-clock seconds and provenance.
json execute(std::string_view command, const json& config);

// CSV projection of an envelope (sample and sweep results).
std::string render_csv(const json& envelope);

// Maps an exception to the process exit code.
int exit_code_for(std::exception_ptr error);

}  // namespace infsamp::runner
