#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "infsamp/channels.hpp"
#include "infsamp/influence.hpp"
#include "infsamp/qubit_subset.hpp"
#include "infsamp/random.hpp"

namespace infsamp {

// Bitstrings use the QubitSubset layout: qubit i at bit i-1.
struct ShotRecord {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  TestGate gate = TestGate::Identity;

  QubitSubset flipset() const { return QubitSubset::from_mask(a ^ b); }
};

enum class StorageMode { Full, Marginal };

// Empirical distribution of flip-sets for one test gate (or for the mixed
// random-gate run). FULL keeps a count per observed subset; MARGINAL keeps
// only how often each qubit appeared in the flip-set.
class SubsetDistribution {
 public:
  SubsetDistribution(int num_qubits, StorageMode mode);

  int num_qubits() const { return num_qubits_; }
  StorageMode mode() const { return mode_; }
  std::uint64_t total_shots() const { return total_; }

  void add(std::uint64_t flip_mask);
  void merge(const SubsetDistribution& other);

  // Shots whose flip-set meets S. MARGINAL storage answers only |S| <= 1.
  std::uint64_t overlap_count(QubitSubset s) const;
  double overlap_probability(QubitSubset s) const;

  // Per-qubit counts Pr[i in T] * total, index i-1. Projected in FULL mode.
  std::vector<std::uint64_t> marginal_counts() const;
  SubsetDistribution to_marginal() const;

  // FULL only: count of an exact flip-set, and all entries sorted by mask.
  std::uint64_t count_of(QubitSubset s) const;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> sorted_entries() const;
  std::size_t distinct_subsets() const { return counts_.size(); }

  friend bool operator==(const SubsetDistribution& x, const SubsetDistribution& y);

 private:
  void require_full(const char* what) const;

  int num_qubits_;
  StorageMode mode_;
  std::uint64_t total_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
  std::vector<std::uint64_t> marginals_;
};

enum class GateSet { Two, Three, RandomI, RandomII };

std::string_view to_string(GateSet g);
std::optional<GateSet> parse_gate_set(std::string_view name);
// Number of test gates the set draws from (2 or 3).
int gate_count(GateSet g);
bool is_random(GateSet g);

struct SamplerConfig {
  GateSet gate_set = GateSet::Two;
  std::uint64_t shots = 0;  // total M across gates
  NoiseModel noise;
  std::uint64_t seed = 0;
  int workers = 1;
  StorageMode mode = StorageMode::Full;
  std::size_t max_distinct_subsets = std::size_t{1} << 22;
  // Shots per RNG substream; fixed so results do not depend on `workers`.
  std::uint64_t chunk_shots = 4096;

  void validate() const;
};

// Shots given to each fixed gate: M split as evenly as possible, the first
// gates taking the remainder.
std::vector<std::uint64_t> split_shots(std::uint64_t total, int gates);

struct SampleSet {
  GateSet gate_set = GateSet::Two;
  // Fixed-gate sets: entry l-1 for gate l. Random sets: a single entry.
  std::vector<SubsetDistribution> distributions;

  const SubsetDistribution& for_gate(TestGate g) const;
  std::uint64_t shots(TestGate g) const { return for_gate(g).total_shots(); }
};

// Simulates Influence-Sample shots on a junta view. Noiseless outcome tables
// p(b_K | a_K) over the support K are precomputed per test gate, so a shot
// costs O(2^k + n) regardless of the register size.
class InfluenceSampler {
 public:
  static constexpr int kMaxSupport = 10;

  InfluenceSampler(JuntaView view, NoiseModel noise);

  int num_qubits() const { return view_.num_qubits(); }
  const JuntaView& view() const { return view_; }
  const NoiseModel& noise() const { return noise_; }

  ShotRecord shot(TestGate gate, RandomStream& rng) const;
  // Shot with a fixed initial bitstring `a`.
  ShotRecord shot_from(TestGate gate, std::uint64_t a, RandomStream& rng) const;

  // Noiseless p(b_K | a_K) with local index ordering the support increasingly,
  // lowest qubit most significant. Row-major [a][b].
  const std::vector<double>& outcome_table(TestGate gate) const;

 private:
  std::uint64_t sample_support(TestGate gate, std::uint64_t a_local, RandomStream& rng) const;
  std::uint64_t sample_support_jittered(TestGate gate, std::uint64_t a_local, RandomStream& rng) const;
  std::uint64_t apply_noise(TestGate gate, std::uint64_t b, RandomStream& rng) const;

  JuntaView view_;
  NoiseModel noise_;
  std::vector<int> support_;
  std::uint64_t noisy_mask_ = 0;
  std::array<std::vector<double>, 3> tables_;      // p(b|a)
  std::array<std::vector<double>, 3> cumulative_;  // row-wise running sums
};

ShotRecord influence_sample_shot(const InfluenceSampler& sampler, TestGate gate, RandomStream& rng);

// Fixed gate sets (TWO, THREE).
SampleSet run_sampling(const InfluenceSampler& sampler, const SamplerConfig& config);
// Random gate sets (RANDOM_I, RANDOM_II): the gate is drawn uniformly per shot.
SampleSet run_sampling_random(const InfluenceSampler& sampler, const SamplerConfig& config);
// Dispatches on the gate set.
SampleSet sample(const InfluenceSampler& sampler, const SamplerConfig& config);

// Noiseless flip-pattern distribution over the support, averaged over a:
// q(f) = 2^-k sum_a p(a xor f | a), local indexing as in outcome_table.
std::vector<double> exact_flip_distribution(const InfluenceSampler& sampler, TestGate gate);

// Exact Pr[T_l meets S] including classical flip noise. Angle jitter has no
// closed form here and is rejected.
double exact_noisy_sampler(const InfluenceSampler& sampler, TestGate gate, QubitSubset s);

}  // namespace infsamp
