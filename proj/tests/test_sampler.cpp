#include "doctest.h"

#include <chrono>
#include <cmath>

#include "helpers.hpp"
#include "infsamp/channels.hpp"
#include "infsamp/errors.hpp"
#include "infsamp/influence.hpp"
#include "infsamp/sampler.hpp"

using namespace infsamp;

namespace {

GateSpec gate(GateKind kind, std::vector<int> qubits, double theta = 0.0, double lambda = 0.0) {
  return GateSpec{kind, std::move(qubits), theta, lambda, 0.0};
}

InfluenceSampler make(ProcessSpec spec, NoiseModel noise = NoiseModel::noiseless()) {
  return InfluenceSampler(embed_junta(spec), noise);
}

SamplerConfig config(GateSet gates, std::uint64_t shots, std::uint64_t seed, StorageMode mode = StorageMode::Full) {
  SamplerConfig c;
  c.gate_set = gates;
  c.shots = shots;
  c.seed = seed;
  c.mode = mode;
  return c;
}

}  // namespace

TEST_CASE("identity process never flips without noise") {
  const auto sampler = make(ProcessSpec{5, {}});
  RandomStream rng(1, 0);
  for (TestGate g : kAllTestGates) {
    for (int i = 0; i < 200; ++i) CHECK(influence_sample_shot(sampler, g, rng).flipset().empty());
  }
  const auto set = run_sampling(sampler, config(GateSet::Three, 1000, 5));
  for (TestGate g : kAllTestGates) {
    const auto& d = set.for_gate(g);
    CHECK(d.count_of(QubitSubset{}) == d.total_shots());
    CHECK(d.distinct_subsets() == 1);
  }
}

TEST_CASE("controlled flip from a fixed input") {
  // Control qubit 2, target qubit 1: a = 0100 maps to b = 1100.
  const auto sampler = make(ProcessSpec{4, {gate(GateKind::CNOT, {2, 1})}});
  RandomStream rng(2, 0);
  const std::uint64_t a = 0b0010;
  for (int i = 0; i < 50; ++i) {
    const auto shot = sampler.shot_from(TestGate::Identity, a, rng);
    CHECK(shot.b == 0b0011);
    CHECK(shot.flipset() == QubitSubset::of({1}));
  }
}

TEST_CASE("Hadamard test gate on CNOT flips only the control") {
  const auto sampler = make(ProcessSpec{2, {gate(GateKind::CNOT, {1, 2})}});
  const auto q = exact_flip_distribution(sampler, TestGate::Hadamard);
  // Local index: qubit 1 is the high bit.
  CHECK(std::abs(q[0] - 0.5) < 1e-12);
  CHECK(std::abs(q[2] - 0.5) < 1e-12);
  CHECK(std::abs(q[1]) < 1e-12);
  CHECK(std::abs(q[3]) < 1e-12);
  const auto set = run_sampling(sampler, config(GateSet::Two, 40000, 3));
  const auto& d = set.for_gate(TestGate::Hadamard);
  CHECK(d.overlap_count(QubitSubset::of({2})) == 0);
  const double p1 = d.overlap_probability(QubitSubset::of({1}));
  CHECK(std::abs(p1 - 0.5) < 4 * std::sqrt(0.25 / 20000));
}

TEST_CASE("exact oracles agree with the dense process matrix") {
  RandomStream rng(77, 0);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 2 + trial % 2;
    const auto k = testing::random_channel(n, 2, rng);
    const auto chi = kraus_to_chi(k);
    const InfluenceSampler sampler(JuntaView(n, QubitSubset::full(n), k), NoiseModel::noiseless());
    for (auto s : all_subsets(n)) {
      const auto e = influence_samplers_exact(chi, s);
      for (TestGate g : kAllTestGates) {
        CHECK(std::abs(exact_noisy_sampler(sampler, g, s) - e[static_cast<std::size_t>(gate_index(g) - 1)]) < 1e-10);
      }
    }
  }
}

TEST_CASE("empirical samplers are unbiased") {
  RandomStream rng(5, 5);
  const auto k = testing::random_channel(2, 3, rng);
  const InfluenceSampler sampler(JuntaView(3, QubitSubset::of({1, 3}), k), NoiseModel::spam());
  const auto set = run_sampling(sampler, config(GateSet::Three, 90000, 11));
  for (auto s : all_subsets(3)) {
    for (TestGate g : kAllTestGates) {
      const auto& d = set.for_gate(g);
      const double p = exact_noisy_sampler(sampler, g, s);
      const double sd = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(d.total_shots()));
      CHECK(std::abs(d.overlap_probability(s) - p) <= 4 * sd + 1e-12);
    }
  }
}

TEST_CASE("noise floor on an uninfluenced qubit") {
  NoiseModel noise;
  noise.flip = {0.01, 0.02, 0.03};
  const auto sampler = make(ProcessSpec{3, {gate(GateKind::CNOT, {1, 2})}}, noise);
  const auto set = run_sampling(sampler, config(GateSet::Three, 300000, 8));
  for (TestGate g : kAllTestGates) {
    const double p = noise.flip_probability(g);
    const auto& d = set.for_gate(g);
    const double est = d.overlap_probability(QubitSubset::of({3}));
    CHECK(std::abs(est - p) < 4 * std::sqrt(p * (1 - p) / static_cast<double>(d.total_shots())));
  }
}

TEST_CASE("results are independent of the worker count") {
  const auto sampler = make(ProcessSpec{6, {gate(GateKind::CUS, {2, 5})}}, NoiseModel::spam());
  auto c = config(GateSet::Three, 50001, 1234);
  c.workers = 1;
  const auto one = run_sampling(sampler, c);
  c.workers = 3;
  const auto three = run_sampling(sampler, c);
  REQUIRE(one.distributions.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(one.distributions[i] == three.distributions[i]);
  c.seed = 1235;
  CHECK_FALSE(run_sampling(sampler, c).distributions[0] == one.distributions[0]);
}

TEST_CASE("marginal projection equals direct marginal accumulation") {
  const auto sampler = make(ProcessSpec{8, {gate(GateKind::CNOT, {1, 2}), gate(GateKind::RY, {7}, 0.9)}},
                            NoiseModel::spam());
  auto full_cfg = config(GateSet::Two, 30000, 99);
  auto marg_cfg = config(GateSet::Two, 30000, 99, StorageMode::Marginal);
  const auto full = run_sampling(sampler, full_cfg);
  const auto marg = run_sampling(sampler, marg_cfg);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(full.distributions[i].marginal_counts() == marg.distributions[i].marginal_counts());
    CHECK(full.distributions[i].to_marginal() == marg.distributions[i]);
    for (auto c : marg.distributions[i].marginal_counts()) CHECK(c <= marg.distributions[i].total_shots());
  }
  std::uint64_t sum = 0;
  for (const auto& [mask, c] : full.distributions[0].sorted_entries()) sum += c;
  CHECK(sum == full.distributions[0].total_shots());
  CHECK_THROWS_AS(marg.distributions[0].overlap_count(QubitSubset::of({1, 2})), CapabilityError);
  CHECK_THROWS_AS(marg.distributions[0].sorted_entries(), CapabilityError);
  CHECK(marg.distributions[0].overlap_count(QubitSubset::of({7})) > 0);
}

TEST_CASE("shot split gives remainders to the first gates") {
  CHECK(split_shots(10, 3) == std::vector<std::uint64_t>{4, 3, 3});
  CHECK(split_shots(11, 3) == std::vector<std::uint64_t>{4, 4, 3});
  CHECK(split_shots(260000, 2) == std::vector<std::uint64_t>{130000, 130000});
  const auto sampler = make(ProcessSpec{2, {}});
  const auto set = run_sampling(sampler, config(GateSet::Three, 10, 0));
  CHECK(set.shots(TestGate::Identity) == 4);
  CHECK(set.shots(TestGate::RxHalfPi) == 3);
}

TEST_CASE("random test gates") {
  const auto sampler = make(ProcessSpec{4, {gate(GateKind::CNOT, {1, 2})}});
  const auto set = sample(sampler, config(GateSet::RandomI, 40000, 21));
  REQUIRE(set.distributions.size() == 1);
  const double pr = set.distributions[0].overlap_probability(QubitSubset::of({1, 2}));
  CHECK(std::abs(pr - 0.5) < 4 * std::sqrt(0.25 / 40000));
  CHECK(set.distributions[0].overlap_count(QubitSubset::of({3, 4})) == 0);
  CHECK_THROWS_AS(set.for_gate(TestGate::Identity), CapabilityError);
  CHECK_THROWS_AS(run_sampling(sampler, config(GateSet::RandomI, 10, 0)), ValidationError);
  CHECK_THROWS_AS(run_sampling_random(sampler, config(GateSet::Two, 10, 0)), ValidationError);

  const auto us = make(ProcessSpec{4, {gate(GateKind::US, {1})}});
  const auto set2 = sample(us, config(GateSet::RandomII, 45000, 22));
  const double pr2 = set2.distributions[0].overlap_probability(QubitSubset::of({1}));
  CHECK(std::abs(pr2 - 2.0 / 3.0) < 4 * std::sqrt(2.0 / 9.0 / 45000));
}

TEST_CASE("distinct-subset cap") {
  NoiseModel heavy;
  heavy.flip = {0.3, 0.3, 0.3};
  const auto sampler = make(ProcessSpec{30, {}}, heavy);
  auto c = config(GateSet::Two, 20000, 1);
  c.max_distinct_subsets = 1000;
  CHECK_THROWS_AS(run_sampling(sampler, c), SizeError);
  c.mode = StorageMode::Marginal;
  CHECK_NOTHROW(run_sampling(sampler, c));
}

TEST_CASE("angle jitter flips idle and support qubits alike") {
  NoiseModel jitter;
  jitter.gate_jitter = 0.3;
  const double rate = (1 - std::exp(-0.09)) / 2;
  const auto sampler = make(ProcessSpec{3, {gate(GateKind::Z, {1})}}, jitter);
  const auto set = run_sampling(sampler, config(GateSet::Two, 200000, 4));
  const auto& d = set.for_gate(TestGate::Identity);
  const double sd = std::sqrt(rate * (1 - rate) / static_cast<double>(d.total_shots()));
  CHECK(std::abs(d.overlap_probability(QubitSubset::of({1})) - rate) < 4 * sd);
  CHECK(std::abs(d.overlap_probability(QubitSubset::of({3})) - rate) < 4 * sd);
  CHECK_THROWS_AS(exact_noisy_sampler(sampler, TestGate::Identity, QubitSubset::of({1})), CapabilityError);
}

TEST_CASE("per-shot cost does not grow exponentially with n") {
  auto timed = [](int n) {
    ProcessSpec spec{n, {gate(GateKind::CTRL_PHASE_DAMP, {1, 2}, 0.0, 0.8), gate(GateKind::CZ, {3, 4})}};
    const auto sampler = make(spec, NoiseModel::spam());
    auto c = config(GateSet::Two, 200000, 1, StorageMode::Marginal);
    const auto start = std::chrono::steady_clock::now();
    run_sampling(sampler, c);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double t8 = timed(8);
  const double t24 = timed(24);
  // Linear in n at most: 3x more qubits, generous constant.
  CHECK(t24 < 6.0 * t8 + 0.05);
}

TEST_CASE("sampler configuration validation") {
  const auto sampler = make(ProcessSpec{2, {}});
  CHECK_THROWS_AS(run_sampling(sampler, config(GateSet::Two, 0, 0)), ValidationError);
  auto c = config(GateSet::Two, 10, 0);
  c.workers = 0;
  CHECK_THROWS_AS(run_sampling(sampler, c), ValidationError);
  CHECK(parse_gate_set("rand2") == GateSet::RandomII);
  CHECK_FALSE(parse_gate_set("4").has_value());
  const JuntaView wide(12, QubitSubset::full(11), KrausSet::identity(11));
  CHECK_THROWS_AS(InfluenceSampler(wide, NoiseModel::noiseless()), SizeError);
}
