#include "doctest.h"

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "infsamp/channels.hpp"
#include "infsamp/errors.hpp"
#include "infsamp/inference.hpp"
#include "infsamp/tomography.hpp"

using namespace infsamp;

namespace {

GateSpec gate(GateKind kind, std::vector<int> qubits, double theta = 0.0) {
  return GateSpec{kind, std::move(qubits), theta, 0.0, 0.0};
}

SamplerConfig config(GateSet gates, std::uint64_t shots, std::uint64_t seed, StorageMode mode = StorageMode::Full) {
  SamplerConfig c;
  c.gate_set = gates;
  c.shots = shots;
  c.seed = seed;
  c.mode = mode;
  return c;
}

SubsetDistribution half_on(QubitSubset s, std::uint64_t shots) {
  SubsetDistribution d(4, StorageMode::Full);
  for (std::uint64_t i = 0; i < shots; ++i) d.add(i % 2 == 0 ? s.mask() : 0);
  return d;
}

}  // namespace

TEST_CASE("estimator on simple distributions") {
  SubsetDistribution empty(3, StorageMode::Full);
  for (int i = 0; i < 10; ++i) empty.add(0);
  const auto e0 = estimate_sampler(empty, QubitSubset::of({1, 2}));
  CHECK(e0.value == 0.0);
  CHECK(e0.stderr_ == 0.0);

  const auto d = half_on(QubitSubset::of({2}), 10000);
  const auto e = estimate_sampler(d, QubitSubset::of({2}));
  CHECK(e.value == doctest::Approx(0.5));
  CHECK(e.stderr_ == doctest::Approx(0.005));
  CHECK(estimate_sampler(d, QubitSubset::of({3, 4})).value == 0.0);
  CHECK_THROWS_AS(estimate_sampler(d.to_marginal(), QubitSubset::of({2, 3})), CapabilityError);
  CHECK(estimate_sampler(d.to_marginal(), QubitSubset::of({2})).value == doctest::Approx(0.5));
}

TEST_CASE("bounds and their standard errors") {
  const std::array<SamplerEstimate, 3> cnot{SamplerEstimate{0.5, 0.0, 0}, SamplerEstimate{0.5, 0.0, 0},
                                            SamplerEstimate{0.75, 0.0, 0}};
  const auto b = bounds_from_estimates(QubitSubset::of({1, 2}), cnot);
  CHECK(b.two_gate->lower == doctest::Approx(0.5));
  CHECK(b.two_gate->upper == doctest::Approx(1.0));
  CHECK(b.three_gate->lower == doctest::Approx(0.75));
  CHECK(b.three_gate->upper == doctest::Approx(0.875));
  CHECK(b.best().upper == doctest::Approx(0.875));

  // Two gates at 0.5 with M = 10^4 total: Var(IU) = 2 (0.25 + 0.25) / 10^4.
  const std::array<SamplerEstimate, 2> half{SamplerEstimate{0.5, 0.005, 5000}, SamplerEstimate{0.5, 0.005, 5000}};
  const auto h = bounds_from_estimates(QubitSubset::of({1}), half);
  CHECK(h.two_gate_stderr == doctest::Approx(0.01));
  CHECK_FALSE(h.three_gate.has_value());

  const std::array<SamplerEstimate, 2> zeros{};
  const auto z = bounds_from_estimates(QubitSubset::of({1}), zeros);
  CHECK(z.best().lower == 0.0);
  CHECK(z.best().upper == 0.0);

  const std::array<SamplerEstimate, 2> big{SamplerEstimate{0.8, 0.0, 1}, SamplerEstimate{0.7, 0.0, 1}};
  const auto clamped = bounds_from_estimates(QubitSubset::of({1}), big);
  CHECK(clamped.best().upper == 1.0);
  CHECK(clamped.upper_raw == doctest::Approx(1.5));
}

TEST_CASE("random-gate bounds") {
  const auto r1 = random_gate_bounds(QubitSubset::of({1}), SamplerEstimate{0.3, 0.01, 100}, GateSet::RandomI);
  CHECK(r1.best().lower == doctest::Approx(0.3));
  CHECK(r1.best().upper == doctest::Approx(0.6));
  CHECK(r1.best_upper_stderr() == doctest::Approx(0.02));
  const auto r2 = random_gate_bounds(QubitSubset::of({1}), SamplerEstimate{0.4, 0.0, 100}, GateSet::RandomII);
  CHECK(r2.best().upper == doctest::Approx(0.6));
}

TEST_CASE("epsilon of the distance bound") {
  CHECK(junta_epsilon(0.0034) == doctest::Approx(0.0607).epsilon(0.005));
  CHECK(std::abs(junta_epsilon(0.0034) - (std::sqrt(0.0034) + 0.0034 / std::numbers::sqrt2)) < 1e-15);
  CHECK(junta_epsilon(0.0) == 0.0);
  CHECK(junta_epsilon(2.0) == doctest::Approx(1.0 + 1.0 / std::numbers::sqrt2));
  const auto e = junta_epsilon_estimate(0.01, 0.001);
  CHECK_FALSE(e.one_sided);
  CHECK(e.stderr_ == doctest::Approx(0.001 * (0.5 / 0.1 + 1 / std::numbers::sqrt2)));
  const auto g = junta_epsilon_estimate(0.0, 0.001);
  CHECK(g.one_sided);
  CHECK(g.upper == doctest::Approx(junta_epsilon(0.002)));
}

TEST_CASE("HIQI finds the planted qubits") {
  const InfluenceSampler sampler(embed_junta(ProcessSpec{4, {gate(GateKind::CNOT, {2, 1})}}),
                                 NoiseModel::noiseless());
  const auto r = hiqi(sampler, config(GateSet::Two, 260000, 1));
  CHECK(r.t == QubitSubset::of({1, 2}));
  CHECK(r.iu_complement == 0.0);
  CHECK_FALSE(r.complement_surrogate);
  REQUIRE(r.t_bounds.has_value());
  CHECK(r.per_qubit.size() == 4);
  CHECK(r.shots == 260000);

  const InfluenceSampler id(embed_junta(ProcessSpec{4, {}}), NoiseModel::noiseless());
  CHECK(hiqi(id, config(GateSet::Two, 1000, 1)).t.empty());
}

TEST_CASE("threshold semantics are strict") {
  SubsetDistribution d1(3, StorageMode::Full);
  SubsetDistribution d2(3, StorageMode::Full);
  // IU_{1} = 0.004 + 0.002 = 0.006 exactly; IU_{2} = 0.007.
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t m1 = 0;
    std::uint64_t m2 = 0;
    if (i < 4) m1 |= 0b001;
    if (i < 2) m2 |= 0b001;
    if (i < 7) m1 |= 0b010;
    d1.add(m1);
    d2.add(m2);
  }
  SampleSet set{GateSet::Two, {d1, d2}};
  const double iu1 = hiqi(set, 1.0).per_qubit[0].best().upper;
  CHECK(hiqi(set, iu1).t == QubitSubset::of({2}));
  CHECK(hiqi(set, std::nextafter(iu1, 0.0)).t == QubitSubset::of({1, 2}));
  CHECK(hiqi(set, 0.007).t.empty());
  CHECK_THROWS_AS(hiqi(set, 0.0), ValidationError);
}

TEST_CASE("marginal HIQI uses a flagged union bound") {
  NoiseModel noise;
  noise.flip = {0.001, 0.001, 0.001};
  const InfluenceSampler sampler(embed_junta(ProcessSpec{6, {gate(GateKind::CNOT, {1, 2})}}), noise);
  const auto full = hiqi(sampler, config(GateSet::Two, 100000, 3));
  const auto marg = hiqi(sampler, config(GateSet::Two, 100000, 3, StorageMode::Marginal));
  CHECK(full.t == marg.t);
  CHECK(marg.complement_surrogate);
  CHECK_FALSE(marg.complement_bounds.has_value());
  CHECK(marg.iu_complement >= full.iu_complement - 1e-12);
}

TEST_CASE("junta tester verdicts") {
  const auto spec = ProcessSpec{4, {gate(GateKind::CNOT, {1, 2}), gate(GateKind::RX, {3}, 1.0)}};
  const InfluenceSampler sampler(embed_junta(spec), NoiseModel::noiseless());
  const auto no = junta_tester(sampler, config(GateSet::Two, 20000, 5), 2);
  CHECK_FALSE(no.yes);
  CHECK(no.t_size == 3);
  CHECK_FALSE(no.epsilon.has_value());
  const auto yes = junta_tester(sampler, config(GateSet::Two, 20000, 5), 3);
  CHECK(yes.yes);
  REQUIRE(yes.epsilon.has_value());
  CHECK(yes.epsilon->value == 0.0);
  CHECK_THROWS_AS(junta_tester(sampler, config(GateSet::Two, 100, 5), 4), ValidationError);
  CHECK_THROWS_AS(junta_tester(sampler, config(GateSet::Two, 100, 5), 0), ValidationError);
}

TEST_CASE("distance law on random channels") {
  RandomStream rng(2718, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 2;
    const auto k = testing::random_channel(n, 2, rng);
    const auto chi = kraus_to_chi(k);
    const JuntaView view(n, QubitSubset::full(n), k);
    for (auto t : all_subsets(n)) {
      if (t.empty()) continue;
      const auto sub = choi_to_chi(exact_subprocess_choi(view, t, 3));
      CHECK(testing::frobenius(sub.entries(), reduce_subprocess(chi, t).entries()) < 1e-10);
      const double d = process_distance(chi, tensor_with_identity(sub, t, n));
      CHECK(d <= junta_epsilon(influence_exact(chi, t.complement(n))) + 1e-9);
    }
  }
}

TEST_CASE("IU standard error matches repeated runs") {
  const InfluenceSampler sampler(embed_junta(ProcessSpec{3, {gate(GateKind::RY, {1}, 0.5)}}), NoiseModel::spam());
  const auto s = QubitSubset::of({1});
  std::vector<double> ius;
  double predicted = 0.0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto set = run_sampling(sampler, config(GateSet::Two, 4000, seed));
    const auto b = bounds_for(set, s);
    ius.push_back(b.upper_raw);
    predicted += b.two_gate_stderr * b.two_gate_stderr;
  }
  predicted /= static_cast<double>(ius.size());
  double mean = 0.0;
  for (double v : ius) mean += v;
  mean /= static_cast<double>(ius.size());
  double var = 0.0;
  for (double v : ius) var += (v - mean) * (v - mean);
  var /= static_cast<double>(ius.size() - 1);
  CHECK(std::abs(std::sqrt(var) / std::sqrt(predicted) - 1.0) < 0.3);
}
