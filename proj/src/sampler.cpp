#include "infsamp/sampler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <thread>

#include "infsamp/errors.hpp"

namespace infsamp {

namespace {

constexpr std::uint64_t kRandomGateStreamTag = 7;

std::uint64_t stream_id(std::uint64_t tag, std::uint64_t chunk) { return (tag << 40) | chunk; }

std::size_t gate_slot(TestGate g) { return static_cast<std::size_t>(gate_index(g) - 1); }

Matrix rx(double angle) {
  const double c = std::cos(angle / 2);
  const double s = std::sin(angle / 2);
  Matrix m(2, 2);
  m << c, -kI * s, -kI * s, c;
  return m;
}

// Applies a 2x2 operator to local qubit j of a k-qubit state vector.
void apply_single(Vector& psi, const Matrix& op, int j, int k) {
  const std::size_t stride = std::size_t{1} << (k - 1 - j);
  const std::size_t size = std::size_t{1} << k;
  for (std::size_t base = 0; base < size; ++base) {
    if ((base & stride) != 0) continue;
    const auto i0 = static_cast<Eigen::Index>(base);
    const auto i1 = static_cast<Eigen::Index>(base | stride);
    const Complex x0 = psi(i0);
    const Complex x1 = psi(i1);
    psi(i0) = op(0, 0) * x0 + op(0, 1) * x1;
    psi(i1) = op(1, 0) * x0 + op(1, 1) * x1;
  }
}

std::uint64_t draw_from_cumulative(const double* row, std::size_t size, double u) {
  const double target = u * row[size - 1];
  const double* it = std::upper_bound(row, row + size, target);
  return static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - row, static_cast<std::ptrdiff_t>(size) - 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// SubsetDistribution

SubsetDistribution::SubsetDistribution(int num_qubits, StorageMode mode) : num_qubits_(num_qubits), mode_(mode) {
  if (num_qubits < 1 || num_qubits > kMaxQubits) throw ValidationError("SubsetDistribution: qubit count out of range");
  if (mode_ == StorageMode::Marginal) marginals_.assign(static_cast<std::size_t>(num_qubits), 0);
}

void SubsetDistribution::add(std::uint64_t flip_mask) {
  ++total_;
  if (mode_ == StorageMode::Full) {
    ++counts_[flip_mask];
    return;
  }
  for (std::uint64_t m = flip_mask; m != 0; m &= m - 1) ++marginals_[static_cast<std::size_t>(std::countr_zero(m))];
}

void SubsetDistribution::merge(const SubsetDistribution& other) {
  if (other.num_qubits_ != num_qubits_ || other.mode_ != mode_) {
    throw ValidationError("SubsetDistribution::merge: incompatible distributions");
  }
  total_ += other.total_;
  for (const auto& [mask, c] : other.counts_) counts_[mask] += c;
  for (std::size_t i = 0; i < marginals_.size(); ++i) marginals_[i] += other.marginals_[i];
}

void SubsetDistribution::require_full(const char* what) const {
  if (mode_ != StorageMode::Full) {
    throw CapabilityError(std::string(what) + ": marginal-only data discards multi-qubit flip-set information");
  }
}

std::uint64_t SubsetDistribution::overlap_count(QubitSubset s) const {
  if (s.max_qubit() > num_qubits_) throw ValidationError("overlap_count: subset " + s.to_string() + " out of range");
  if (s.empty()) return 0;
  if (mode_ == StorageMode::Marginal) {
    if (s.size() > 1) {
      throw CapabilityError("overlap for multi-qubit set " + s.to_string() +
                            " needs FULL storage; marginal data discards multi-qubit flip-set information");
    }
    return marginals_[static_cast<std::size_t>(s.qubits().front() - 1)];
  }
  std::uint64_t total = 0;
  for (const auto& [mask, c] : counts_) {
    if ((mask & s.mask()) != 0) total += c;
  }
  return total;
}

double SubsetDistribution::overlap_probability(QubitSubset s) const {
  if (total_ == 0) return 0.0;
  return static_cast<double>(overlap_count(s)) / static_cast<double>(total_);
}

std::vector<std::uint64_t> SubsetDistribution::marginal_counts() const {
  if (mode_ == StorageMode::Marginal) return marginals_;
  std::vector<std::uint64_t> out(static_cast<std::size_t>(num_qubits_), 0);
  for (const auto& [mask, c] : counts_) {
    for (std::uint64_t m = mask; m != 0; m &= m - 1) out[static_cast<std::size_t>(std::countr_zero(m))] += c;
  }
  return out;
}

SubsetDistribution SubsetDistribution::to_marginal() const {
  SubsetDistribution out(num_qubits_, StorageMode::Marginal);
  out.total_ = total_;
  out.marginals_ = marginal_counts();
  return out;
}

std::uint64_t SubsetDistribution::count_of(QubitSubset s) const {
  require_full("count_of");
  const auto it = counts_.find(s.mask());
  return it == counts_.end() ? 0 : it->second;
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> SubsetDistribution::sorted_entries() const {
  require_full("sorted_entries");
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out(counts_.begin(), counts_.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool operator==(const SubsetDistribution& x, const SubsetDistribution& y) {
  return x.num_qubits_ == y.num_qubits_ && x.mode_ == y.mode_ && x.total_ == y.total_ && x.counts_ == y.counts_ &&
         x.marginals_ == y.marginals_;
}

// ---------------------------------------------------------------------------
// Configuration

std::string_view to_string(GateSet g) {
  switch (g) {
    case GateSet::Two:
      return "2";
    case GateSet::Three:
      return "3";
    case GateSet::RandomI:
      return "rand1";
    case GateSet::RandomII:
      return "rand2";
  }
  return "?";
}

std::optional<GateSet> parse_gate_set(std::string_view name) {
  for (GateSet g : {GateSet::Two, GateSet::Three, GateSet::RandomI, GateSet::RandomII}) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

int gate_count(GateSet g) { return (g == GateSet::Two || g == GateSet::RandomI) ? 2 : 3; }

bool is_random(GateSet g) { return g == GateSet::RandomI || g == GateSet::RandomII; }

void SamplerConfig::validate() const {
  if (shots < 1) throw ValidationError("shot budget must be at least 1");
  if (!is_random(gate_set) && shots < static_cast<std::uint64_t>(gate_count(gate_set))) {
    throw ValidationError("shot budget must give every test gate at least one shot");
  }
  if (workers < 1) throw ValidationError("worker count must be at least 1");
  if (chunk_shots < 1) throw ValidationError("chunk size must be at least 1");
  if (max_distinct_subsets < 1) throw ValidationError("distinct-subset cap must be at least 1");
  noise.validate();
}

std::vector<std::uint64_t> split_shots(std::uint64_t total, int gates) {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(gates), total / static_cast<std::uint64_t>(gates));
  for (std::uint64_t r = 0; r < total % static_cast<std::uint64_t>(gates); ++r) ++out[r];
  return out;
}

const SubsetDistribution& SampleSet::for_gate(TestGate g) const {
  if (is_random(gate_set)) throw CapabilityError("random-gate runs do not separate shots by test gate");
  const std::size_t slot = gate_slot(g);
  if (slot >= distributions.size()) {
    throw CapabilityError("gate " + std::to_string(gate_index(g)) + " was not sampled in this run");
  }
  return distributions[slot];
}

// ---------------------------------------------------------------------------
// InfluenceSampler

InfluenceSampler::InfluenceSampler(JuntaView view, NoiseModel noise)
    : view_(std::move(view)), noise_(std::move(noise)), support_(view_.support().qubits()) {
  noise_.validate();
  const int k = static_cast<int>(support_.size());
  if (k > kMaxSupport) {
    throw SizeError("junta support of " + std::to_string(k) + " qubits exceeds the sampler cap of " +
                    std::to_string(kMaxSupport));
  }
  noisy_mask_ = noise_.noisy_qubits(view_.num_qubits()).mask();

  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << k);
  for (TestGate g : kAllTestGates) {
    Matrix v = Matrix::Identity(1, 1);
    for (int j = 0; j < k; ++j) v = kron(v, test_gate_unitary(g));
    const Matrix w = v.adjoint();
    auto& table = tables_[gate_slot(g)];
    table.assign(static_cast<std::size_t>(dim * dim), 0.0);
    for (const auto& op : view_.kraus().operators()) {
      const Matrix m = w * op * v;
      for (Eigen::Index a = 0; a < dim; ++a) {
        for (Eigen::Index b = 0; b < dim; ++b) table[static_cast<std::size_t>(a * dim + b)] += std::norm(m(b, a));
      }
    }
    auto& cum = cumulative_[gate_slot(g)];
    cum = table;
    for (Eigen::Index a = 0; a < dim; ++a) {
      double* row = cum.data() + a * dim;
      for (Eigen::Index b = 1; b < dim; ++b) row[b] += row[b - 1];
    }
  }
}

const std::vector<double>& InfluenceSampler::outcome_table(TestGate gate) const { return tables_[gate_slot(gate)]; }

std::uint64_t InfluenceSampler::sample_support(TestGate gate, std::uint64_t a_local, RandomStream& rng) const {
  const std::size_t dim = std::size_t{1} << support_.size();
  const double* row = cumulative_[gate_slot(gate)].data() + a_local * dim;
  return draw_from_cumulative(row, dim, rng.uniform());
}

std::uint64_t InfluenceSampler::sample_support_jittered(TestGate gate, std::uint64_t a_local,
                                                        RandomStream& rng) const {
  const int k = static_cast<int>(support_.size());
  const std::size_t dim = std::size_t{1} << k;
  const Matrix& u = test_gate_unitary(gate);
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(dim));
  psi(static_cast<Eigen::Index>(a_local)) = 1.0;
  std::vector<Matrix> inversions;
  inversions.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const double prep = noise_.gate_jitter * rng.normal();
    const double inv = noise_.gate_jitter * rng.normal();
    apply_single(psi, u * rx(prep), j, k);
    inversions.push_back((u * rx(inv)).adjoint());
  }
  std::vector<double> cum(dim, 0.0);
  for (const auto& op : view_.kraus().operators()) {
    Vector phi = op * psi;
    for (int j = 0; j < k; ++j) apply_single(phi, inversions[static_cast<std::size_t>(j)], j, k);
    for (std::size_t b = 0; b < dim; ++b) cum[b] += std::norm(phi(static_cast<Eigen::Index>(b)));
  }
  for (std::size_t b = 1; b < dim; ++b) cum[b] += cum[b - 1];
  return draw_from_cumulative(cum.data(), dim, rng.uniform());
}

std::uint64_t InfluenceSampler::apply_noise(TestGate gate, std::uint64_t b, RandomStream& rng) const {
  if (noise_.gate_jitter > 0.0) {
    // Idle qubits see R_x(eta_prep - eta_inv) between preparation and measurement.
    const std::uint64_t idle = low_mask(num_qubits()) & ~view_.support().mask();
    for (std::uint64_t m = idle; m != 0; m &= m - 1) {
      const double prep = noise_.gate_jitter * rng.normal();
      const double inv = noise_.gate_jitter * rng.normal();
      const double s = std::sin(0.5 * (prep - inv));
      if (rng.bernoulli(s * s)) b ^= (m & (~m + 1));
    }
  }
  const double p = noise_.flip_probability(gate);
  if (p <= 0.0) return b;
  for (std::uint64_t m = noisy_mask_; m != 0; m &= m - 1) {
    if (rng.bernoulli(p)) b ^= (m & (~m + 1));
  }
  return b;
}

ShotRecord InfluenceSampler::shot(TestGate gate, RandomStream& rng) const {
  const std::uint64_t a = rng.bits(num_qubits());
  return shot_from(gate, a, rng);
}

ShotRecord InfluenceSampler::shot_from(TestGate gate, std::uint64_t a, RandomStream& rng) const {
  const int k = static_cast<int>(support_.size());
  std::uint64_t a_local = 0;
  for (int j = 0; j < k; ++j) {
    a_local = (a_local << 1) | ((a >> (support_[static_cast<std::size_t>(j)] - 1)) & 1U);
  }
  const std::uint64_t b_local =
      noise_.gate_jitter > 0.0 ? sample_support_jittered(gate, a_local, rng) : sample_support(gate, a_local, rng);
  std::uint64_t b = a & ~view_.support().mask();
  for (int j = 0; j < k; ++j) {
    const std::uint64_t bit = (b_local >> (k - 1 - j)) & 1U;
    b |= bit << (support_[static_cast<std::size_t>(j)] - 1);
  }
  b = apply_noise(gate, b, rng);
  return ShotRecord{a, b, gate};
}

ShotRecord influence_sample_shot(const InfluenceSampler& sampler, TestGate gate, RandomStream& rng) {
  return sampler.shot(gate, rng);
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

struct WorkItem {
  std::size_t slot;            // output distribution index
  std::optional<TestGate> gate;  // nullopt: draw the gate per shot
  std::uint64_t stream;
  std::uint64_t shots;
};

SampleSet run_items(const InfluenceSampler& sampler, const SamplerConfig& config, GateSet gate_set,
                    std::size_t slots, const std::vector<WorkItem>& items) {
  const int n = sampler.num_qubits();
  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(1, items.size()))));
  const int draw_gates = gate_count(gate_set);

  auto check_cap = [&](const SubsetDistribution& d) {
    if (d.mode() == StorageMode::Full && d.distinct_subsets() > config.max_distinct_subsets) {
      throw SizeError("FULL storage exceeded " + std::to_string(config.max_distinct_subsets) +
                      " distinct flip-sets; rerun in MARGINAL mode (--marginals-only)");
    }
  };

  std::vector<std::vector<SubsetDistribution>> partial(
      static_cast<std::size_t>(workers),
      std::vector<SubsetDistribution>(slots, SubsetDistribution(n, config.mode)));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));

  auto work = [&](int w) {
    try {
      auto& acc = partial[static_cast<std::size_t>(w)];
      for (std::size_t i = static_cast<std::size_t>(w); i < items.size(); i += static_cast<std::size_t>(workers)) {
        const WorkItem& item = items[i];
        RandomStream rng(config.seed, item.stream);
        auto& dist = acc[item.slot];
        for (std::uint64_t s = 0; s < item.shots; ++s) {
          const TestGate g =
              item.gate ? *item.gate : kAllTestGates[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(draw_gates)))];
          const ShotRecord r = sampler.shot(g, rng);
          dist.add(r.a ^ r.b);
        }
        check_cap(dist);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SampleSet out;
  out.gate_set = gate_set;
  out.distributions = std::move(partial[0]);
  for (std::size_t w = 1; w < partial.size(); ++w) {
    for (std::size_t s = 0; s < slots; ++s) out.distributions[s].merge(partial[w][s]);
  }
  for (const auto& d : out.distributions) check_cap(d);
  return out;
}

void push_chunks(std::vector<WorkItem>& items, std::size_t slot, std::optional<TestGate> gate, std::uint64_t tag,
                 std::uint64_t shots, std::uint64_t chunk) {
  std::uint64_t index = 0;
  for (std::uint64_t done = 0; done < shots; done += chunk, ++index) {
    items.push_back({slot, gate, stream_id(tag, index), std::min(chunk, shots - done)});
  }
}

}  // namespace

SampleSet run_sampling(const InfluenceSampler& sampler, const SamplerConfig& config) {
  config.validate();
  if (is_random(config.gate_set)) throw ValidationError("run_sampling: use run_sampling_random for random gate sets");
  const int gates = gate_count(config.gate_set);
  const auto per_gate = split_shots(config.shots, gates);
  std::vector<WorkItem> items;
  for (int l = 0; l < gates; ++l) {
    const TestGate g = kAllTestGates[static_cast<std::size_t>(l)];
    push_chunks(items, static_cast<std::size_t>(l), g, static_cast<std::uint64_t>(gate_index(g)),
                per_gate[static_cast<std::size_t>(l)], config.chunk_shots);
  }
  return run_items(sampler, config, config.gate_set, static_cast<std::size_t>(gates), items);
}

SampleSet run_sampling_random(const InfluenceSampler& sampler, const SamplerConfig& config) {
  config.validate();
  if (!is_random(config.gate_set)) throw ValidationError("run_sampling_random: gate set must be rand1 or rand2");
  std::vector<WorkItem> items;
  push_chunks(items, 0, std::nullopt, kRandomGateStreamTag, config.shots, config.chunk_shots);
  return run_items(sampler, config, config.gate_set, 1, items);
}

SampleSet sample(const InfluenceSampler& sampler, const SamplerConfig& config) {
  return is_random(config.gate_set) ? run_sampling_random(sampler, config) : run_sampling(sampler, config);
}

// ---------------------------------------------------------------------------
// Exact oracles

std::vector<double> exact_flip_distribution(const InfluenceSampler& sampler, TestGate gate) {
  const std::size_t dim = std::size_t{1} << sampler.view().support().size();
  const auto& table = sampler.outcome_table(gate);
  std::vector<double> q(dim, 0.0);
  for (std::size_t a = 0; a < dim; ++a) {
    for (std::size_t b = 0; b < dim; ++b) q[a ^ b] += table[a * dim + b];
  }
  for (double& v : q) v /= static_cast<double>(dim);
  return q;
}

double exact_noisy_sampler(const InfluenceSampler& sampler, TestGate gate, QubitSubset s) {
  const NoiseModel& noise = sampler.noise();
  if (noise.gate_jitter > 0.0) throw CapabilityError("exact sampler expectation does not model angle jitter");
  const int n = sampler.num_qubits();
  if (s.max_qubit() > n) throw ValidationError("exact_noisy_sampler: subset out of range");
  const QubitSubset support = sampler.view().support();
  const auto support_qubits = support.qubits();
  const int k = static_cast<int>(support_qubits.size());
  const QubitSubset noisy = noise.noisy_qubits(n);
  const double p = noise.flip_probability(gate);

  // Qubits of S outside the support only flip through noise.
  double outside = 1.0;
  for (int q : (s & support.complement(n)).qubits()) {
    if (noisy.contains(q)) outside *= 1.0 - p;
  }
  const auto q = exact_flip_distribution(sampler, gate);
  double clean = 0.0;
  for (std::size_t f = 0; f < q.size(); ++f) {
    double weight = q[f];
    for (int j = 0; j < k && weight > 0.0; ++j) {
      const int qubit = support_qubits[static_cast<std::size_t>(j)];
      if (!s.contains(qubit)) continue;
      const bool flipped = ((f >> (k - 1 - j)) & 1U) != 0;
      if (noisy.contains(qubit)) {
        weight *= flipped ? p : 1.0 - p;
      } else if (flipped) {
        weight = 0.0;
      }
    }
    clean += weight;
  }
  return std::clamp(1.0 - clean * outside, 0.0, 1.0);
}

}  // namespace infsamp
