#include "infsamp/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "infsamp/errors.hpp"

namespace infsamp {

namespace {

double binomial_variance(const SamplerEstimate& e) {
  if (e.shots == 0) return 0.0;
  return e.value * (1.0 - e.value) / static_cast<double>(e.shots);
}

}  // namespace

SamplerEstimate estimate_sampler(const SubsetDistribution& dist, QubitSubset s) {
  SamplerEstimate e;
  e.shots = dist.total_shots();
  if (e.shots == 0) return e;
  e.value = dist.overlap_probability(s);
  e.stderr_ = std::sqrt(binomial_variance(e));
  return e;
}

SamplerEstimate estimate_sampler(const SampleSet& set, QubitSubset s, TestGate gate) {
  return estimate_sampler(set.for_gate(gate), s);
}

InfluenceInterval InfluenceBounds::best() const {
  if (three_gate) return *three_gate;
  if (two_gate) return *two_gate;
  if (random_gate) return *random_gate;
  return {};
}

double InfluenceBounds::best_upper_stderr() const {
  if (three_gate) return three_gate_stderr;
  if (two_gate) return two_gate_stderr;
  return random_gate_stderr;
}

InfluenceBounds bounds_from_estimates(QubitSubset s, std::span<const SamplerEstimate> estimates) {
  if (estimates.size() != 2 && estimates.size() != 3) {
    throw ValidationError("bounds_from_estimates: expected 2 or 3 sampler estimates");
  }
  for (const auto& e : estimates) {
    if (!(e.value >= 0.0 && e.value <= 1.0)) throw ValidationError("bounds_from_estimates: estimate outside [0,1]");
  }
  InfluenceBounds out;
  out.subset = s;
  out.samplers.assign(estimates.begin(), estimates.end());

  const SamplerTriple two{estimates[0].value, estimates[1].value, 0.0};
  out.two_gate = influence_bounds(two, BoundMode::TwoGate);
  out.two_gate_stderr = std::sqrt(binomial_variance(estimates[0]) + binomial_variance(estimates[1]));
  out.upper_raw = estimates[0].value + estimates[1].value;

  if (estimates.size() == 3) {
    const SamplerTriple three{estimates[0].value, estimates[1].value, estimates[2].value};
    out.three_gate = influence_bounds(three, BoundMode::ThreeGate);
    double var = 0.0;
    for (const auto& e : estimates) var += binomial_variance(e);
    out.three_gate_stderr = 0.5 * std::sqrt(var);
    out.upper_raw = 0.5 * (three[0] + three[1] + three[2]);
  }
  return out;
}

InfluenceBounds random_gate_bounds(QubitSubset s, const SamplerEstimate& overlap, GateSet gate_set) {
  if (!is_random(gate_set)) throw ValidationError("random_gate_bounds: gate set must be rand1 or rand2");
  const double factor = gate_set == GateSet::RandomI ? 2.0 : 1.5;
  InfluenceBounds out;
  out.subset = s;
  out.samplers = {overlap};
  out.upper_raw = factor * overlap.value;
  out.random_gate = InfluenceInterval{std::clamp(overlap.value, 0.0, 1.0), std::clamp(out.upper_raw, 0.0, 1.0)};
  out.random_gate_stderr = factor * overlap.stderr_;
  return out;
}

InfluenceBounds bounds_for(const SampleSet& set, QubitSubset s) {
  if (is_random(set.gate_set)) {
    return random_gate_bounds(s, estimate_sampler(set.distributions.at(0), s), set.gate_set);
  }
  std::vector<SamplerEstimate> est;
  for (const auto& d : set.distributions) est.push_back(estimate_sampler(d, s));
  return bounds_from_estimates(s, est);
}

double junta_epsilon(double iu) {
  const double c = std::clamp(iu, 0.0, 1.0);
  return std::sqrt(c) + c / std::numbers::sqrt2;
}

EpsilonEstimate junta_epsilon_estimate(double iu, double iu_stderr) {
  EpsilonEstimate e;
  const double c = std::clamp(iu, 0.0, 1.0);
  e.value = junta_epsilon(c);
  if (c <= 0.0 || c <= iu_stderr) {
    e.one_sided = true;
    e.upper = junta_epsilon(c + 2.0 * iu_stderr);
    return e;
  }
  e.stderr_ = iu_stderr * (0.5 / std::sqrt(c) + 1.0 / std::numbers::sqrt2);
  e.upper = e.value + 2.0 * e.stderr_;
  return e;
}

HiqiResult hiqi(const SampleSet& set, double delta) {
  if (!(delta > 0.0)) throw ValidationError("hiqi: delta must be positive");
  if (set.distributions.empty()) throw ValidationError("hiqi: no sampled distributions");
  HiqiResult out;
  out.num_qubits = set.distributions.front().num_qubits();
  out.delta = delta;
  out.gate_set = set.gate_set;
  for (const auto& d : set.distributions) out.shots += d.total_shots();

  const int n = out.num_qubits;
  for (int q = 1; q <= n; ++q) {
    out.per_qubit.push_back(bounds_for(set, QubitSubset::of({q})));
    if (out.per_qubit.back().best().upper > delta) out.t = out.t | QubitSubset::of({q});
  }

  const QubitSubset complement = out.t.complement(n);
  const bool full = set.distributions.front().mode() == StorageMode::Full;
  if (full) {
    if (!out.t.empty()) out.t_bounds = bounds_for(set, out.t);
    out.complement_bounds = bounds_for(set, complement);
    out.iu_complement = out.complement_bounds->best().upper;
    out.iu_complement_stderr = out.complement_bounds->best_upper_stderr();
    if (complement.empty()) {
      out.iu_complement = 0.0;
      out.iu_complement_stderr = 0.0;
    }
    return out;
  }

  if (out.t.size() == 1) out.t_bounds = out.per_qubit[static_cast<std::size_t>(out.t.qubits().front() - 1)];
  double sum = 0.0;
  double var = 0.0;
  for (int q : complement.qubits()) {
    const auto& b = out.per_qubit[static_cast<std::size_t>(q - 1)];
    sum += b.best().upper;
    var += b.best_upper_stderr() * b.best_upper_stderr();
  }
  out.iu_complement = std::min(sum, 1.0);
  out.iu_complement_stderr = std::sqrt(var);
  out.complement_surrogate = complement.size() > 1;
  if (complement.size() == 1) out.complement_bounds = out.per_qubit[static_cast<std::size_t>(complement.qubits().front() - 1)];
  return out;
}

HiqiResult hiqi(const InfluenceSampler& sampler, const SamplerConfig& config, double delta) {
  return hiqi(sample(sampler, config), delta);
}

TesterVerdict junta_tester(HiqiResult result, int k) {
  if (k < 1 || k >= result.num_qubits) {
    throw ValidationError("junta_tester: k must satisfy 1 <= k < n (n = " + std::to_string(result.num_qubits) + ")");
  }
  TesterVerdict v;
  v.k = k;
  v.t_size = result.t.size();
  v.yes = v.t_size <= k;
  if (v.yes) v.epsilon = junta_epsilon_estimate(result.iu_complement, result.iu_complement_stderr);
  v.hiqi = std::move(result);
  return v;
}

TesterVerdict junta_tester(const InfluenceSampler& sampler, const SamplerConfig& config, int k, double delta) {
  if (k < 1 || k >= sampler.num_qubits()) {
    throw ValidationError("junta_tester: k must satisfy 1 <= k < n (n = " + std::to_string(sampler.num_qubits()) + ")");
  }
  return junta_tester(hiqi(sampler, config, delta), k);
}

}  // namespace infsamp
