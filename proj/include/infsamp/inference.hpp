#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "infsamp/influence.hpp"
#include "infsamp/qubit_subset.hpp"
#include "infsamp/sampler.hpp"

namespace infsamp {

inline constexpr double kDefaultDelta = 0.006;

struct SamplerEstimate {
  double value = 0.0;
  double stderr_ = 0.0;  // sqrt(p(1-p)/M_l)
  std::uint64_t shots = 0;
};

// Fraction of shots whose flip-set meets S.
SamplerEstimate estimate_sampler(const SubsetDistribution& dist, QubitSubset s);
SamplerEstimate estimate_sampler(const SampleSet& set, QubitSubset s, TestGate gate);

struct InfluenceBounds {
  QubitSubset subset;
  // Per fixed gate (entry l-1), or the single overlap estimate of a random run.
  std::vector<SamplerEstimate> samplers;

  std::optional<InfluenceInterval> two_gate;
  double two_gate_stderr = 0.0;
  std::optional<InfluenceInterval> three_gate;
  double three_gate_stderr = 0.0;
  // Random test gates: [Pr, 2 Pr] (two gates) or [Pr, 3/2 Pr] (three gates).
  std::optional<InfluenceInterval> random_gate;
  double random_gate_stderr = 0.0;

  // Unclamped upper bound behind best().
  double upper_raw = 0.0;

  // Three-gate if available, else two-gate, else random-gate.
  InfluenceInterval best() const;
  double best_upper_stderr() const;
};

// Influence bounds from two or three per-gate estimates. Var(IU) is
// sum_l p_l(1-p_l)/M_l for two gates and a quarter of the three-gate sum.
InfluenceBounds bounds_from_estimates(QubitSubset s, std::span<const SamplerEstimate> estimates);

// Overlap-probability bounds from a random-gate run.
InfluenceBounds random_gate_bounds(QubitSubset s, const SamplerEstimate& overlap, GateSet gate_set);

// Bounds for S from every distribution in the set.
InfluenceBounds bounds_for(const SampleSet& set, QubitSubset s);

struct EpsilonEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
  // Near IU = 0 the delta method breaks down; only `upper` is meaningful then.
  bool one_sided = false;
  double upper = 0.0;
};

// sqrt(IU) + IU/sqrt(2) with IU clamped to [0, 1].
double junta_epsilon(double iu);
EpsilonEstimate junta_epsilon_estimate(double iu, double iu_stderr);

struct HiqiResult {
  int num_qubits = 0;
  double delta = kDefaultDelta;
  GateSet gate_set = GateSet::Two;
  std::uint64_t shots = 0;

  QubitSubset t;
  std::vector<InfluenceBounds> per_qubit;  // index i-1
  std::optional<InfluenceBounds> t_bounds;
  std::optional<InfluenceBounds> complement_bounds;  // FULL storage only

  double iu_complement = 0.0;
  double iu_complement_stderr = 0.0;
  // True when IU_{T^c} is the union bound over single-qubit IUs.
  bool complement_surrogate = false;
};

// T = {i : IU_{i} > delta}; IU_{T^c} from the same distributions.
HiqiResult hiqi(const SampleSet& set, double delta = kDefaultDelta);
HiqiResult hiqi(const InfluenceSampler& sampler, const SamplerConfig& config, double delta = kDefaultDelta);

struct TesterVerdict {
  bool yes = false;
  int k = 0;
  int t_size = 0;
  std::optional<EpsilonEstimate> epsilon;  // present iff yes
  HiqiResult hiqi;
};

TesterVerdict junta_tester(HiqiResult result, int k);
TesterVerdict junta_tester(const InfluenceSampler& sampler, const SamplerConfig& config, int k,
                           double delta = kDefaultDelta);

}  // namespace infsamp
