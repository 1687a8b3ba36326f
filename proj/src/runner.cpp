#include "infsamp/runner.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <new>
#include <set>
#include <sstream>

#include "infsamp/errors.hpp"
#include "infsamp/inference.hpp"
#include "infsamp/influence.hpp"
#include "infsamp/tomography.hpp"

#ifndef INFSAMP_VERSION
#define INFSAMP_VERSION "0.0.0"
#endif

namespace infsamp::runner {

namespace {

// ---- config parsing ------------------------------------------------------

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_as(const json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + ": wrong type");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

std::uint64_t get_count(const json& j, const std::string& where) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0)) {
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < -1000000000 || v > 1000000000) throw ConfigError(where + ": integer out of range");
  return static_cast<int>(v);
}

std::vector<int> get_qubits(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of qubit indices");
  std::vector<int> out;
  for (const auto& q : j) out.push_back(get_int(q, where));
  return out;
}

QubitSubset get_subset(const json& j, int n, const std::string& where) {
  const auto qubits = get_qubits(j, where);
  for (int q : qubits) {
    if (q < 1 || q > n) throw ConfigError(where + ": qubit " + std::to_string(q) + " outside 1.." + std::to_string(n));
  }
  return QubitSubset::from_qubits(qubits);
}

GateSpec parse_gate(const json& j, const std::string& where) {
  require_object(j, where);
  reject_unknown(j, {"kind", "qubits", "params"}, where);
  if (!j.contains("kind") || !j.contains("qubits")) throw ConfigError(where + ": 'kind' and 'qubits' are required");
  GateSpec g;
  const auto kind_name = get_as<std::string>(j.at("kind"), where + ".kind");
  const auto kind = parse_gate_kind(kind_name);
  if (!kind) throw ConfigError(where + ": unknown gate kind '" + kind_name + "'");
  g.kind = *kind;
  g.qubits = get_qubits(j.at("qubits"), where + ".qubits");
  if (j.contains("params")) {
    const auto& p = j.at("params");
    require_object(p, where + ".params");
    reject_unknown(p, {"theta", "lambda", "phi"}, where + ".params");
    if (p.contains("theta")) g.theta = get_number(p.at("theta"), where + ".params.theta");
    if (p.contains("lambda")) g.lambda = get_number(p.at("lambda"), where + ".params.lambda");
    if (p.contains("phi")) g.phi = get_number(p.at("phi"), where + ".params.phi");
  }
  return g;
}

ProcessSpec parse_process(const json& j) {
  require_object(j, "process");
  reject_unknown(j, {"n", "layers"}, "process");
  if (!j.contains("n")) throw ConfigError("process: 'n' is required");
  ProcessSpec spec;
  spec.num_qubits = get_int(j.at("n"), "process.n");
  if (spec.num_qubits < 1 || spec.num_qubits > kMaxQubits) throw ConfigError("process.n must lie in 1..64");
  if (j.contains("layers")) {
    const auto& layers = j.at("layers");
    if (!layers.is_array()) throw ConfigError("process.layers: expected an array");
    for (std::size_t i = 0; i < layers.size(); ++i) {
      spec.layers.push_back(parse_gate(layers[i], "process.layers[" + std::to_string(i) + "]"));
    }
  }
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("process: ") + e.what());
  }
  return spec;
}

// Missing keys take the default SPAM rates; a missing noise block is noiseless.
NoiseModel parse_noise(const json& j, int n) {
  if (j.is_null()) return NoiseModel::noiseless();
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "none") return NoiseModel::noiseless();
    if (name == "spam") return NoiseModel::spam();
    if (name == "spam-even") return NoiseModel::spam_even_qubits(n);
    throw ConfigError("noise: unknown preset '" + name + "' (none, spam, spam-even)");
  }
  require_object(j, "noise");
  reject_unknown(j, {"flip", "qubits", "jitter"}, "noise");
  NoiseModel m = NoiseModel::spam();
  if (j.contains("flip")) {
    const auto& f = j.at("flip");
    require_object(f, "noise.flip");
    reject_unknown(f, {"gate1", "gate2", "gate3"}, "noise.flip");
    const char* keys[3] = {"gate1", "gate2", "gate3"};
    for (std::size_t l = 0; l < 3; ++l) {
      if (f.contains(keys[l])) m.flip[l] = get_number(f.at(keys[l]), std::string("noise.flip.") + keys[l]);
    }
  }
  if (j.contains("qubits")) {
    const auto& q = j.at("qubits");
    if (q.is_string()) {
      const auto name = q.get<std::string>();
      if (name == "all") {
        m.flip_qubits.reset();
      } else if (name == "even") {
        m.flip_qubits = NoiseModel::spam_even_qubits(n).flip_qubits;
      } else {
        throw ConfigError("noise.qubits: expected 'all', 'even' or a list");
      }
    } else {
      m.flip_qubits = get_subset(q, n, "noise.qubits");
    }
  }
  if (j.contains("jitter")) m.gate_jitter = get_number(j.at("jitter"), "noise.jitter");
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("noise: ") + e.what());
  }
  return m;
}

SweepConfig parse_sweep(const json& j, const ProcessSpec& spec) {
  require_object(j, "sweep");
  reject_unknown(j, {"layer", "param", "start", "stop", "steps", "mode"}, "sweep");
  SweepConfig s;
  if (j.contains("layer")) {
    const int layer = get_int(j.at("layer"), "sweep.layer");
    if (layer < 0) throw ConfigError("sweep.layer must be non-negative");
    s.layer = static_cast<std::size_t>(layer);
  }
  if (s.layer >= spec.layers.size()) throw ConfigError("sweep.layer does not name a process layer");
  if (j.contains("param")) s.param = get_as<std::string>(j.at("param"), "sweep.param");
  if (s.param != "theta" && s.param != "lambda" && s.param != "phi") {
    throw ConfigError("sweep.param must be theta, lambda or phi");
  }
  if (!j.contains("start") || !j.contains("stop") || !j.contains("steps")) {
    throw ConfigError("sweep: 'start', 'stop' and 'steps' are required");
  }
  s.start = get_number(j.at("start"), "sweep.start");
  s.stop = get_number(j.at("stop"), "sweep.stop");
  s.steps = get_int(j.at("steps"), "sweep.steps");
  if (s.steps < 1) throw ConfigError("sweep.steps must be at least 1");
  if (j.contains("mode")) s.mode = get_as<std::string>(j.at("mode"), "sweep.mode");
  if (s.mode != "exact" && s.mode != "sampled" && s.mode != "both") {
    throw ConfigError("sweep.mode must be exact, sampled or both");
  }
  return s;
}

const std::set<std::string> kTopLevelKeys{
    "process",      "noise",     "seed",   "workers",    "shots",     "delta",
    "k",            "gates",     "marginals_only",       "shots_per_setting",
    "tomography_max_qubits",     "subsets", "cross_check", "reference", "max_distinct_subsets",
    "sweep",        "out",       "format"};

// ---- serialization helpers ----------------------------------------------

json subset_json(QubitSubset s) { return s.qubits(); }

json interval_json(const InfluenceInterval& i) { return {{"lower", i.lower}, {"upper", i.upper}}; }

json interval_json(const InfluenceInterval& i, double upper_stderr) {
  json j = interval_json(i);
  j["upper_stderr"] = upper_stderr;
  return j;
}

json estimate_json(const SamplerEstimate& e) {
  return {{"value", e.value}, {"stderr", e.stderr_}, {"shots", e.shots}};
}

json bounds_json(const InfluenceBounds& b) {
  json j;
  j["subset"] = subset_json(b.subset);
  j["samplers"] = json::array();
  for (const auto& e : b.samplers) j["samplers"].push_back(estimate_json(e));
  if (b.two_gate) j["two_gate"] = interval_json(*b.two_gate, b.two_gate_stderr);
  if (b.three_gate) j["three_gate"] = interval_json(*b.three_gate, b.three_gate_stderr);
  if (b.random_gate) j["random_gate"] = interval_json(*b.random_gate, b.random_gate_stderr);
  j["best"] = interval_json(b.best(), b.best_upper_stderr());
  j["upper_raw"] = b.upper_raw;
  return j;
}

json epsilon_json(const EpsilonEstimate& e) {
  return {{"value", e.value}, {"stderr", e.stderr_}, {"one_sided", e.one_sided}, {"upper", e.upper}};
}

json hiqi_json(const HiqiResult& r) {
  json j;
  j["num_qubits"] = r.num_qubits;
  j["delta"] = r.delta;
  j["gate_set"] = std::string(to_string(r.gate_set));
  j["shots"] = r.shots;
  j["t"] = subset_json(r.t);
  j["t_complement"] = subset_json(r.t.complement(r.num_qubits));
  j["per_qubit"] = json::array();
  for (const auto& b : r.per_qubit) j["per_qubit"].push_back(bounds_json(b));
  j["t_bounds"] = r.t_bounds ? bounds_json(*r.t_bounds) : json(nullptr);
  j["complement_bounds"] = r.complement_bounds ? bounds_json(*r.complement_bounds) : json(nullptr);
  j["iu_complement"] = r.iu_complement;
  j["iu_complement_stderr"] = r.iu_complement_stderr;
  j["complement_surrogate"] = r.complement_surrogate;
  return j;
}

json matrix_json(const Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return {{"real", std::move(re)}, {"imag", std::move(im)}};
}

std::string gate_label(TestGate g) { return std::to_string(gate_index(g)); }

// ---- command helpers -----------------------------------------------------

bool sampling_command(std::string_view command, const ExperimentConfig& c) {
  if (command == "exact") return false;
  if (command == "sweep") return c.sweep && c.sweep->mode != "exact";
  return true;
}

std::vector<QubitSubset> requested_subsets(const ExperimentConfig& c, bool include_full) {
  if (!c.subsets.empty()) return c.subsets;
  std::vector<QubitSubset> out;
  const int n = c.process.num_qubits;
  for (int q = 1; q <= n; ++q) out.push_back(QubitSubset::of({q}));
  if (include_full && n > 1) out.push_back(QubitSubset::full(n));
  return out;
}

InfluenceSampler make_sampler(const ExperimentConfig& c) {
  const QubitSubset support = c.process.support();
  if (support.size() > InfluenceSampler::kMaxSupport) {
    throw SizeError("process support has " + std::to_string(support.size()) + " qubits; the sampler handles at most " +
                    std::to_string(InfluenceSampler::kMaxSupport));
  }
  return InfluenceSampler(embed_junta(c.process), c.noise);
}

SamplerConfig sampler_config(const ExperimentConfig& c, std::uint64_t seed) {
  SamplerConfig s;
  s.gate_set = c.gates;
  s.shots = c.shots;
  s.noise = c.noise;
  s.seed = seed;
  s.workers = c.workers;
  s.mode = c.marginals_only ? StorageMode::Marginal : StorageMode::Full;
  s.max_distinct_subsets = static_cast<std::size_t>(c.max_distinct_subsets);
  s.validate();
  return s;
}

void check_subsets_for_mode(const std::vector<QubitSubset>& subsets, const ExperimentConfig& c) {
  if (!c.marginals_only) return;
  for (const auto& s : subsets) {
    if (s.size() > 1) {
      throw CapabilityError("subset " + s.to_string() + " needs joint statistics; marginal-only runs answer single qubits");
    }
  }
}

json exact_record(const ChiMatrix& chi, QubitSubset s) {
  const auto samplers = influence_samplers_exact(chi, s);
  const auto diag = influence_diagnostics(chi, s);
  json j;
  j["subset"] = subset_json(s);
  j["influence"] = influence_exact(chi, s);
  j["samplers"] = {samplers[0], samplers[1], samplers[2]};
  j["two_gate"] = interval_json(influence_bounds(samplers, BoundMode::TwoGate));
  j["three_gate"] = interval_json(influence_bounds(samplers, BoundMode::ThreeGate));
  j["random_gate"] = {
      {"rand1_overlap", 0.5 * (samplers[0] + samplers[1])},
      {"rand2_overlap", (samplers[0] + samplers[1] + samplers[2]) / 3.0},
  };
  j["diagnostics"] = {{"o", diag.o},     {"a", diag.a},     {"b", diag.b},     {"c", diag.c},
                      {"a_o", diag.a_o}, {"b_o", diag.b_o}, {"c_o", diag.c_o}, {"d", diag.d},
                      {"sampler_inequalities", diag.satisfies_sampler_inequalities()}};
  return j;
}

// Expected overlap probability of one stored distribution, noise included.
double exact_overlap(const InfluenceSampler& sampler, GateSet set, std::size_t dist_index, QubitSubset s) {
  if (!is_random(set)) return exact_noisy_sampler(sampler, kAllTestGates[dist_index], s);
  const int g = gate_count(set);
  double sum = 0.0;
  for (int l = 0; l < g; ++l) sum += exact_noisy_sampler(sampler, kAllTestGates[static_cast<std::size_t>(l)], s);
  return sum / g;
}

json z_score(double estimate, double exact, std::uint64_t shots) {
  const double se = shots == 0 ? 0.0 : std::sqrt(exact * (1.0 - exact) / static_cast<double>(shots));
  if (se <= 0.0) return estimate == exact ? json(0.0) : json(nullptr);
  return (estimate - exact) / se;
}

json cross_check(const InfluenceSampler& sampler, const SampleSet& set, const std::vector<QubitSubset>& subsets) {
  if (sampler.noise().gate_jitter > 0.0) {
    throw CapabilityError("cross-check needs closed-form expectations; gate jitter has none");
  }
  json out = json::array();
  for (std::size_t d = 0; d < set.distributions.size(); ++d) {
    for (const auto& s : subsets) {
      const auto est = estimate_sampler(set.distributions[d], s);
      const double exact = exact_overlap(sampler, set.gate_set, d, s);
      out.push_back({{"distribution", is_random(set.gate_set) ? std::string("random") : gate_label(kAllTestGates[d])},
                     {"subset", subset_json(s)},
                     {"estimate", est.value},
                     {"exact", exact},
                     {"shots", est.shots},
                     {"z", z_score(est.value, exact, est.shots)}});
    }
  }
  return out;
}

json distribution_json(const SubsetDistribution& d, const std::string& label) {
  json j;
  j["distribution"] = label;
  j["mode"] = d.mode() == StorageMode::Full ? "full" : "marginal";
  j["shots"] = d.total_shots();
  const auto counts = d.marginal_counts();
  j["marginal_counts"] = counts;
  json rates = json::array();
  for (auto c : counts) rates.push_back(d.total_shots() ? static_cast<double>(c) / static_cast<double>(d.total_shots()) : 0.0);
  j["marginal_rates"] = std::move(rates);
  if (d.mode() == StorageMode::Full) {
    json entries = json::array();
    for (const auto& [mask, count] : d.sorted_entries()) {
      entries.push_back({{"subset", subset_json(QubitSubset::from_mask(mask))}, {"count", count}});
    }
    j["entries"] = std::move(entries);
    j["distinct_subsets"] = d.distinct_subsets();
  }
  return j;
}

std::vector<std::string> distribution_labels(const SampleSet& set) {
  if (is_random(set.gate_set)) return {"random"};
  std::vector<std::string> out;
  for (std::size_t d = 0; d < set.distributions.size(); ++d) out.push_back(gate_label(kAllTestGates[d]));
  return out;
}

// ---- commands --------------------------------------------------------------

json cmd_exact(const ExperimentConfig& c) {
  const ChiMatrix chi = embed_dense(c.process);
  json j;
  j["num_qubits"] = c.process.num_qubits;
  j["support"] = subset_json(c.process.support());
  j["subsets"] = json::array();
  for (const auto& s : requested_subsets(c, true)) j["subsets"].push_back(exact_record(chi, s));
  return j;
}

json cmd_sample(const ExperimentConfig& c) {
  const auto sampler = make_sampler(c);
  const auto config = sampler_config(c, *c.seed);
  const auto subsets = requested_subsets(c, !c.marginals_only);
  check_subsets_for_mode(subsets, c);
  const SampleSet set = sample(sampler, config);
  const auto labels = distribution_labels(set);

  json j;
  j["num_qubits"] = c.process.num_qubits;
  j["gate_set"] = std::string(to_string(set.gate_set));
  j["mode"] = c.marginals_only ? "marginal" : "full";
  j["shots"] = c.shots;
  j["seed"] = *c.seed;
  j["distributions"] = json::array();
  for (std::size_t d = 0; d < set.distributions.size(); ++d) {
    j["distributions"].push_back(distribution_json(set.distributions[d], labels[d]));
  }
  json est = json::array();
  for (std::size_t d = 0; d < set.distributions.size(); ++d) {
    for (const auto& s : subsets) {
      json e = estimate_json(estimate_sampler(set.distributions[d], s));
      e["distribution"] = labels[d];
      e["subset"] = subset_json(s);
      est.push_back(std::move(e));
    }
  }
  j["estimates"] = std::move(est);
  json bounds = json::array();
  for (const auto& s : subsets) bounds.push_back(bounds_json(bounds_for(set, s)));
  j["bounds"] = std::move(bounds);
  if (c.cross_check) j["cross_check"] = cross_check(sampler, set, subsets);
  return j;
}

json cmd_hiqi(const ExperimentConfig& c) {
  const auto sampler = make_sampler(c);
  const auto result = hiqi(sampler, sampler_config(c, *c.seed), c.delta);
  json j = hiqi_json(result);
  j["seed"] = *c.seed;
  j["epsilon"] = epsilon_json(junta_epsilon_estimate(result.iu_complement, result.iu_complement_stderr));
  return j;
}

json cmd_junta_test(const ExperimentConfig& c) {
  if (!c.k) throw ConfigError("junta-test needs 'k'");
  const auto sampler = make_sampler(c);
  const auto verdict = junta_tester(sampler, sampler_config(c, *c.seed), *c.k, c.delta);
  json j;
  j["verdict"] = verdict.yes ? "YES" : "NO";
  j["k"] = verdict.k;
  j["t_size"] = verdict.t_size;
  j["epsilon"] = verdict.epsilon ? epsilon_json(*verdict.epsilon) : json(nullptr);
  j["seed"] = *c.seed;
  j["hiqi"] = hiqi_json(verdict.hiqi);
  return j;
}

json cmd_junta_learn(const ExperimentConfig& c) {
  const auto sampler = make_sampler(c);
  TomographyOptions tomo;
  tomo.shots_per_setting = c.shots_per_setting;
  tomo.seed = *c.seed;
  tomo.workers = c.workers;
  tomo.max_qubits = c.tomography_max_qubits;
  const auto out = junta_learner(sampler, sampler_config(c, *c.seed), c.delta, tomo, c.reference);
  json j;
  j["seed"] = *c.seed;
  j["t"] = subset_json(out.t);
  j["hiqi"] = hiqi_json(out.hiqi);
  j["epsilon"] = epsilon_json(out.epsilon);
  j["epsilon_r"] = out.epsilon_r ? json(*out.epsilon_r) : json(nullptr);
  j["total_bound"] = out.total_bound ? json(*out.total_bound) : json(nullptr);
  j["shots_per_setting"] = c.shots_per_setting;
  if (out.reconstruction) {
    const auto& r = *out.reconstruction;
    j["reconstruction"] = {
        {"num_qubits", r.choi.num_qubits()},
        {"iterations", r.iterations},
        {"min_eigenvalue", r.min_eigenvalue},
        {"tp_deviation", r.tp_deviation},
        {"distance", r.distance ? json(*r.distance) : json(nullptr)},
        {"fidelity", r.fidelity ? json(*r.fidelity) : json(nullptr)},
        {"choi", matrix_json(r.choi.entries())},
    };
  } else {
    j["reconstruction"] = nullptr;
  }
  return j;
}

void set_param(GateSpec& g, const std::string& param, double value) {
  if (param == "theta") g.theta = value;
  if (param == "lambda") g.lambda = value;
  if (param == "phi") g.phi = value;
}

json cmd_sweep(const ExperimentConfig& c) {
  if (!c.sweep) throw ConfigError("sweep needs a 'sweep' block");
  const SweepConfig& sw = *c.sweep;
  const bool want_exact = sw.mode != "sampled";
  const bool want_sampled = sw.mode != "exact";
  const auto subsets = requested_subsets(c, !(want_sampled && c.marginals_only));
  if (want_sampled) check_subsets_for_mode(subsets, c);

  json points = json::array();
  for (int i = 0; i < sw.steps; ++i) {
    const double value =
        sw.steps == 1 ? sw.start : sw.start + (sw.stop - sw.start) * static_cast<double>(i) / (sw.steps - 1);
    ExperimentConfig pc = c;
    set_param(pc.process.layers[sw.layer], sw.param, value);
    try {
      pc.process.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("sweep point ") + std::to_string(i) + ": " + e.what());
    }

    std::optional<ChiMatrix> chi;
    if (want_exact) chi = embed_dense(pc.process);
    std::optional<InfluenceSampler> sampler;
    std::optional<SampleSet> set;
    if (want_sampled) {
      sampler.emplace(make_sampler(pc));
      // Each grid point draws from its own seed so points are independent.
      set = sample(*sampler, sampler_config(pc, *c.seed + static_cast<std::uint64_t>(i)));
    }

    json recs = json::array();
    for (const auto& s : subsets) {
      json r;
      r["subset"] = subset_json(s);
      if (chi) r["exact"] = exact_record(*chi, s);
      if (set) {
        json samp;
        samp["samplers"] = json::array();
        for (const auto& d : set->distributions) samp["samplers"].push_back(estimate_json(estimate_sampler(d, s)));
        samp["bounds"] = bounds_json(bounds_for(*set, s));
        r["sampled"] = std::move(samp);
      }
      recs.push_back(std::move(r));
    }
    json p;
    p["point"] = i;
    p["param"] = sw.param;
    p["value"] = value;
    p["records"] = std::move(recs);
    if (set) p["seed"] = *c.seed + static_cast<std::uint64_t>(i);
    if (set && (c.cross_check || sw.mode == "both")) p["cross_check"] = cross_check(*sampler, *set, subsets);
    points.push_back(std::move(p));
  }
  json j;
  j["num_qubits"] = c.process.num_qubits;
  j["layer"] = sw.layer;
  j["kind"] = std::string(to_string(c.process.layers[sw.layer].kind));
  j["param"] = sw.param;
  j["mode"] = sw.mode;
  j["gate_set"] = std::string(to_string(c.gates));
  j["points"] = std::move(points);
  return j;
}

// ---- CSV -----------------------------------------------------------------

std::string subset_cell(const json& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s[i].get<int>());
  }
  return out;
}

std::string num_cell(const json& v) {
  if (v.is_null()) return "";
  return v.dump();
}

std::string csv_sample(const json& r) {
  std::ostringstream os;
  os << "distribution,qubit,count,shots,rate\n";
  for (const auto& d : r.at("distributions")) {
    const auto& counts = d.at("marginal_counts");
    const auto& rates = d.at("marginal_rates");
    for (std::size_t q = 0; q < counts.size(); ++q) {
      os << d.at("distribution").get<std::string>() << ',' << (q + 1) << ',' << counts[q].dump() << ','
         << d.at("shots").dump() << ',' << rates[q].dump() << '\n';
    }
  }
  return os.str();
}

std::string csv_sweep(const json& r) {
  std::ostringstream os;
  os << "point,param,value,subset,source,gate1,gate2,gate3,influence,il,iu,il3,iu3,z1,z2,z3\n";
  for (const auto& p : r.at("points")) {
    const std::string head = p.at("point").dump() + ',' + p.at("param").get<std::string>() + ',' + p.at("value").dump();
    for (const auto& rec : p.at("records")) {
      const std::string subset = subset_cell(rec.at("subset"));
      if (rec.contains("exact")) {
        const auto& e = rec.at("exact");
        const auto& s = e.at("samplers");
        os << head << ',' << subset << ",exact," << s[0].dump() << ',' << s[1].dump() << ',' << s[2].dump() << ','
           << e.at("influence").dump() << ',' << e.at("two_gate").at("lower").dump() << ','
           << e.at("two_gate").at("upper").dump() << ',' << e.at("three_gate").at("lower").dump() << ','
           << e.at("three_gate").at("upper").dump() << ",,,\n";
      }
      if (rec.contains("sampled")) {
        const auto& sm = rec.at("sampled");
        const auto& s = sm.at("samplers");
        const auto& b = sm.at("bounds");
        std::string cells[3];
        for (std::size_t l = 0; l < 3 && l < s.size(); ++l) cells[l] = s[l].at("value").dump();
        std::string z[3];
        if (p.contains("cross_check")) {
          std::size_t l = 0;
          for (const auto& cc : p.at("cross_check")) {
            if (cc.at("subset") == rec.at("subset") && l < 3) z[l++] = num_cell(cc.at("z"));
          }
        }
        const json two = b.contains("two_gate") ? b.at("two_gate") : b.at("best");
        os << head << ',' << subset << ",sampled," << cells[0] << ',' << cells[1] << ',' << cells[2] << ",,"
           << two.at("lower").dump() << ',' << two.at("upper").dump() << ','
           << (b.contains("three_gate") ? b.at("three_gate").at("lower").dump() : "") << ','
           << (b.contains("three_gate") ? b.at("three_gate").at("upper").dump() : "") << ',' << z[0] << ',' << z[1]
           << ',' << z[2] << '\n';
      }
    }
  }
  return os.str();
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  require_object(j, "config");
  reject_unknown(j, kTopLevelKeys, "config");
  if (!j.contains("process")) throw ConfigError("config: 'process' is required");
  ExperimentConfig c;
  c.process = parse_process(j.at("process"));
  const int n = c.process.num_qubits;
  c.noise = parse_noise(j.contains("noise") ? j.at("noise") : json(nullptr), n);
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = get_count(j.at("seed"), "seed");
  if (j.contains("workers")) c.workers = get_int(j.at("workers"), "workers");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (j.contains("shots")) c.shots = get_count(j.at("shots"), "shots");
  if (j.contains("delta")) c.delta = get_number(j.at("delta"), "delta");
  if (!(c.delta > 0.0)) throw ConfigError("delta must be positive");
  if (j.contains("k") && !j.at("k").is_null()) c.k = get_int(j.at("k"), "k");
  if (j.contains("gates")) {
    const auto& g = j.at("gates");
    const std::string name = g.is_number_integer() ? std::to_string(g.get<int>()) : get_as<std::string>(g, "gates");
    const auto set = parse_gate_set(name);
    if (!set) throw ConfigError("gates must be 2, 3, rand1 or rand2");
    c.gates = *set;
  }
  if (j.contains("marginals_only")) c.marginals_only = get_as<bool>(j.at("marginals_only"), "marginals_only");
  if (j.contains("shots_per_setting")) c.shots_per_setting = get_count(j.at("shots_per_setting"), "shots_per_setting");
  if (j.contains("tomography_max_qubits")) {
    c.tomography_max_qubits = get_int(j.at("tomography_max_qubits"), "tomography_max_qubits");
    if (c.tomography_max_qubits < 1) throw ConfigError("tomography_max_qubits must be at least 1");
  }
  if (j.contains("subsets")) {
    const auto& s = j.at("subsets");
    if (!s.is_array()) throw ConfigError("subsets: expected an array of qubit lists");
    for (std::size_t i = 0; i < s.size(); ++i) {
      c.subsets.push_back(get_subset(s[i], n, "subsets[" + std::to_string(i) + "]"));
    }
  }
  if (j.contains("cross_check")) c.cross_check = get_as<bool>(j.at("cross_check"), "cross_check");
  if (j.contains("reference")) c.reference = get_as<bool>(j.at("reference"), "reference");
  if (j.contains("max_distinct_subsets")) {
    c.max_distinct_subsets = get_count(j.at("max_distinct_subsets"), "max_distinct_subsets");
  }
  if (j.contains("sweep") && !j.at("sweep").is_null()) c.sweep = parse_sweep(j.at("sweep"), c.process);
  if (j.contains("out")) c.out = get_as<std::string>(j.at("out"), "out");
  if (j.contains("format")) c.format = get_as<std::string>(j.at("format"), "format");
  if (c.format != "json" && c.format != "csv") throw ConfigError("format must be json or csv");
  return c;
}

json to_json(const ExperimentConfig& c) {
  json layers = json::array();
  for (const auto& g : c.process.layers) {
    layers.push_back({{"kind", std::string(to_string(g.kind))},
                      {"qubits", g.qubits},
                      {"params", {{"theta", g.theta}, {"lambda", g.lambda}, {"phi", g.phi}}}});
  }
  json noise = {{"flip", {{"gate1", c.noise.flip[0]}, {"gate2", c.noise.flip[1]}, {"gate3", c.noise.flip[2]}}},
                {"qubits", c.noise.flip_qubits ? json(c.noise.flip_qubits->qubits()) : json("all")},
                {"jitter", c.noise.gate_jitter}};
  json subsets = json::array();
  for (const auto& s : c.subsets) subsets.push_back(s.qubits());
  json j;
  j["process"] = {{"n", c.process.num_qubits}, {"layers", std::move(layers)}};
  j["noise"] = std::move(noise);
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  j["workers"] = c.workers;
  j["shots"] = c.shots;
  j["delta"] = c.delta;
  j["k"] = c.k ? json(*c.k) : json(nullptr);
  j["gates"] = std::string(to_string(c.gates));
  j["marginals_only"] = c.marginals_only;
  j["shots_per_setting"] = c.shots_per_setting;
  j["tomography_max_qubits"] = c.tomography_max_qubits;
  j["subsets"] = std::move(subsets);
  j["cross_check"] = c.cross_check;
  j["reference"] = c.reference;
  j["max_distinct_subsets"] = c.max_distinct_subsets;
  if (c.sweep) {
    j["sweep"] = {{"layer", c.sweep->layer}, {"param", c.sweep->param}, {"start", c.sweep->start},
                  {"stop", c.sweep->stop},   {"steps", c.sweep->steps}, {"mode", c.sweep->mode}};
  } else {
    j["sweep"] = nullptr;
  }
  j["out"] = c.out;
  j["format"] = c.format;
  return j;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"exact", "sample", "hiqi", "junta-test", "junta-learn", "sweep"};
  return names;
}

json run_command(std::string_view command, const ExperimentConfig& c) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw ConfigError("unknown command '" + std::string(command) + "'");
  }
  if (sampling_command(command, c) && !c.seed) {
    throw ConfigError("command '" + std::string(command) + "' draws random samples and needs a seed");
  }
  if (command == "exact") return cmd_exact(c);
  if (command == "sample") return cmd_sample(c);
  if (command == "hiqi") return cmd_hiqi(c);
  if (command == "junta-test") return cmd_junta_test(c);
  if (command == "junta-learn") return cmd_junta_learn(c);
  return cmd_sweep(c);
}

json execute(std::string_view command, const json& config) {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentConfig c = parse_config(config);
  json results = run_command(command, c);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  json env;
  env["schema"] = kSchema;
  env["schema_version"] = kSchemaVersion;
  env["command"] = std::string(command);
  env["config"] = to_json(c);
  env["results"] = std::move(results);
  env["versions"] = {
      {"infsamp", INFSAMP_VERSION},
      {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                    std::to_string(EIGEN_MINOR_VERSION)},
      {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                            "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
  };
  env["wall_clock_seconds"] = seconds;
  env["provenance"] = {{"seed", c.seed ? json(*c.seed) : json(nullptr)},
                       {"workers", c.workers},
                       {"rng", "philox4x32-10"}};
  return env;
}

std::string render_csv(const json& envelope) {
  const auto command = envelope.at("command").get<std::string>();
  if (command == "sample") return csv_sample(envelope.at("results"));
  if (command == "sweep") return csv_sweep(envelope.at("results"));
  throw ConfigError("CSV output is available for sample and sweep only");
}

int exit_code_for(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError&) {
    return kConfigError;
  } catch (const ValidationError&) {
    return kConfigError;
  } catch (const json::exception&) {
    return kConfigError;
  } catch (const CapabilityError&) {
    return kCapabilityError;
  } catch (const SizeError&) {
    return kResourceError;
  } catch (const std::bad_alloc&) {
    return kResourceError;
  } catch (...) {
    return kInternal;
  }
}

}  // namespace infsamp::runner
