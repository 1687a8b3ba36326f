#include "infsamp/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "infsamp/errors.hpp"
#include "infsamp/influence.hpp"
#include "infsamp/pauli.hpp"
#include "infsamp/random.hpp"

namespace infsamp {

namespace {

constexpr std::uint64_t kTomographyStreamTag = 9;

constexpr std::array<InputState, 6> kInputs{InputState::ZPlus,  InputState::ZMinus, InputState::XPlus,
                                            InputState::XMinus, InputState::YPlus,  InputState::YMinus};
constexpr std::array<MeasurementBasis, 3> kBases{MeasurementBasis::X, MeasurementBasis::Y, MeasurementBasis::Z};

Vector input_vector(InputState s) {
  const double r = 1.0 / std::numbers::sqrt2;
  Vector v(2);
  switch (s) {
    case InputState::ZPlus:
      v << 1.0, 0.0;
      break;
    case InputState::ZMinus:
      v << 0.0, 1.0;
      break;
    case InputState::XPlus:
      v << r, r;
      break;
    case InputState::XMinus:
      v << r, -r;
      break;
    case InputState::YPlus:
      v << r, kI * r;
      break;
    case InputState::YMinus:
      v << r, -kI * r;
      break;
  }
  return v;
}

TestGate basis_gate(MeasurementBasis b) {
  switch (b) {
    case MeasurementBasis::Z:
      return TestGate::Identity;
    case MeasurementBasis::X:
      return TestGate::Hadamard;
    case MeasurementBasis::Y:
      return TestGate::RxHalfPi;
  }
  return TestGate::Identity;
}

// Register layout for simulating Phi_T: the qubits of T first, then the rest
// of the process support. Kraus operators are embedded accordingly.
struct SubRegister {
  int t = 0;
  int m = 0;
  std::vector<int> t_qubits;
  std::vector<Matrix> kraus;
};

SubRegister make_register(const JuntaView& view, QubitSubset t, int max_qubits) {
  if (t.empty()) throw ValidationError("tomography: target set T must be non-empty");
  if (t.max_qubit() > view.num_qubits()) throw ValidationError("tomography: T exceeds the register");
  if (t.size() > max_qubits) {
    throw SizeError("tomography on " + std::to_string(t.size()) + " qubits exceeds the cap of " +
                    std::to_string(max_qubits));
  }
  SubRegister reg;
  reg.t_qubits = t.qubits();
  reg.t = t.size();
  std::vector<int> order = reg.t_qubits;
  for (int q : (view.support() & t.complement(view.num_qubits())).qubits()) order.push_back(q);
  reg.m = static_cast<int>(order.size()) - reg.t;
  const int r = static_cast<int>(order.size());
  if (r > 12) throw SizeError("tomography register of " + std::to_string(r) + " qubits is too large");
  std::vector<int> positions;
  for (int q : view.support().qubits()) {
    positions.push_back(static_cast<int>(std::find(order.begin(), order.end(), q) - order.begin()));
  }
  for (const auto& k : view.kraus().operators()) reg.kraus.push_back(embed_operator(k, positions, r));
  return reg;
}

Matrix product_rotation(const TomographySetting& s) {
  Matrix w = Matrix::Identity(1, 1);
  for (auto b : s.bases) w = kron(w, basis_rotation(b));
  return w;
}

// Noiseless outcome distribution of one setting with T^c support qubits in
// computational state c.
std::vector<double> outcome_probabilities(const SubRegister& reg, const TomographySetting& s, std::uint64_t c) {
  const auto dt = static_cast<Eigen::Index>(std::size_t{1} << reg.t);
  const auto dm = static_cast<Eigen::Index>(std::size_t{1} << reg.m);
  Vector psi_t = Vector::Ones(1);
  for (auto in : s.inputs) psi_t = kron(psi_t, input_vector(in));
  Vector psi = Vector::Zero(dt * dm);
  for (Eigen::Index i = 0; i < dt; ++i) psi(i * dm + static_cast<Eigen::Index>(c)) = psi_t(i);
  const Matrix w = product_rotation(s);
  std::vector<double> p(static_cast<std::size_t>(dt), 0.0);
  for (const auto& k : reg.kraus) {
    const Vector phi = k * psi;
    // Row o, column c': amplitude of outcome o with the rest in c'.
    const Matrix amp = w * Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                               phi.data(), dt, dm);
    for (Eigen::Index o = 0; o < dt; ++o) p[static_cast<std::size_t>(o)] += amp.row(o).squaredNorm();
  }
  return p;
}

// Per measured qubit flip probabilities for a setting.
std::vector<double> flip_rates(const SubRegister& reg, const TomographySetting& s, const NoiseModel& noise,
                               QubitSubset noisy) {
  std::vector<double> out(static_cast<std::size_t>(reg.t), 0.0);
  for (int j = 0; j < reg.t; ++j) {
    if (noisy.contains(reg.t_qubits[static_cast<std::size_t>(j)])) {
      out[static_cast<std::size_t>(j)] = noise.flip_probability(basis_gate(s.bases[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

void apply_flip_noise(std::vector<double>& p, const std::vector<double>& rates) {
  const int t = static_cast<int>(rates.size());
  for (int j = 0; j < t; ++j) {
    const double r = rates[static_cast<std::size_t>(j)];
    if (r <= 0.0) continue;
    const std::size_t bit = std::size_t{1} << (t - 1 - j);
    std::vector<double> q(p.size());
    for (std::size_t o = 0; o < p.size(); ++o) q[o] = (1.0 - r) * p[o] + r * p[o ^ bit];
    p = std::move(q);
  }
}

Matrix tp_project(const Matrix& j, std::size_t d) {
  const Matrix excess = trace_first(j, d, d) - Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  const Matrix out = j - kron(Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)), excess) /
                             static_cast<double>(d);
  return 0.5 * (out + out.adjoint());
}

double tp_deviation(const Matrix& j, std::size_t d) {
  return (trace_first(j, d, d) - Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace

std::string to_string(InputState s) {
  switch (s) {
    case InputState::ZPlus:
      return "0";
    case InputState::ZMinus:
      return "1";
    case InputState::XPlus:
      return "+";
    case InputState::XMinus:
      return "-";
    case InputState::YPlus:
      return "+i";
    case InputState::YMinus:
      return "-i";
  }
  return "?";
}

std::string to_string(MeasurementBasis b) {
  switch (b) {
    case MeasurementBasis::X:
      return "X";
    case MeasurementBasis::Y:
      return "Y";
    case MeasurementBasis::Z:
      return "Z";
  }
  return "?";
}

Matrix input_density(InputState s) {
  const Vector v = input_vector(s);
  return v * v.adjoint();
}

Matrix basis_rotation(MeasurementBasis b) {
  const double r = 1.0 / std::numbers::sqrt2;
  Matrix m(2, 2);
  switch (b) {
    case MeasurementBasis::X:
      m << r, r, r, -r;
      break;
    case MeasurementBasis::Y:  // H S^dagger
      m << r, -kI * r, r, kI * r;
      break;
    case MeasurementBasis::Z:
      m << 1.0, 0.0, 0.0, 1.0;
      break;
  }
  return m;
}

std::string TomographySetting::input_label() const {
  std::string s;
  for (std::size_t j = 0; j < inputs.size(); ++j) s += (j ? "," : "") + to_string(inputs[j]);
  return s;
}

std::string TomographySetting::basis_label() const {
  std::string s;
  for (auto b : bases) s += to_string(b);
  return s;
}

std::vector<TomographySetting> tomography_settings(int num_qubits) {
  if (num_qubits < 1) throw ValidationError("tomography_settings: need at least one qubit");
  std::size_t n_in = 1;
  std::size_t n_basis = 1;
  for (int j = 0; j < num_qubits; ++j) {
    n_in *= 6;
    n_basis *= 3;
  }
  std::vector<TomographySetting> out;
  out.reserve(n_in * n_basis);
  for (std::size_t i = 0; i < n_in; ++i) {
    for (std::size_t b = 0; b < n_basis; ++b) {
      TomographySetting s;
      s.inputs.resize(static_cast<std::size_t>(num_qubits));
      s.bases.resize(static_cast<std::size_t>(num_qubits));
      std::size_t ii = i;
      std::size_t bb = b;
      for (int j = num_qubits - 1; j >= 0; --j) {
        s.inputs[static_cast<std::size_t>(j)] = kInputs[ii % 6];
        s.bases[static_cast<std::size_t>(j)] = kBases[bb % 3];
        ii /= 6;
        bb /= 3;
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

TomographyData generate_tomography_data(const JuntaView& view, QubitSubset t, const NoiseModel& noise,
                                        const TomographyOptions& options) {
  noise.validate();
  if (options.shots_per_setting < 1) throw ValidationError("tomography: shots per setting must be at least 1");
  if (options.workers < 1) throw ValidationError("tomography: worker count must be at least 1");
  const SubRegister reg = make_register(view, t, options.max_qubits);
  const QubitSubset noisy = noise.noisy_qubits(view.num_qubits());

  TomographyData data;
  data.t = t;
  data.settings = tomography_settings(reg.t);
  data.shots_per_setting = options.shots_per_setting;
  const std::size_t count = data.settings.size();
  const std::size_t dt = std::size_t{1} << reg.t;
  const std::size_t dm = std::size_t{1} << reg.m;
  data.counts.assign(count, std::vector<std::uint64_t>(dt, 0));
  data.frequencies.assign(count, std::vector<double>(dt, 0.0));

  const int workers = std::max(1, std::min<int>(options.workers, static_cast<int>(count)));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  auto work = [&](int w) {
    try {
      for (std::size_t i = static_cast<std::size_t>(w); i < count; i += static_cast<std::size_t>(workers)) {
        const auto& s = data.settings[i];
        // Cumulative outcome tables, one per computational state of T^c.
        std::vector<std::vector<double>> cum(dm);
        for (std::size_t c = 0; c < dm; ++c) {
          cum[c] = outcome_probabilities(reg, s, c);
          for (std::size_t o = 1; o < dt; ++o) cum[c][o] += cum[c][o - 1];
        }
        const auto rates = flip_rates(reg, s, noise, noisy);
        RandomStream rng(options.seed, (kTomographyStreamTag << 40) | i);
        auto& counts = data.counts[i];
        for (std::uint64_t shot = 0; shot < options.shots_per_setting; ++shot) {
          const std::uint64_t c = rng.bits(reg.m);
          const auto& row = cum[c];
          const double u = rng.uniform() * row.back();
          std::size_t o = static_cast<std::size_t>(std::upper_bound(row.begin(), row.end(), u) - row.begin());
          o = std::min(o, dt - 1);
          for (int j = 0; j < reg.t; ++j) {
            const double r = rates[static_cast<std::size_t>(j)];
            if (r > 0.0 && rng.bernoulli(r)) o ^= std::size_t{1} << (reg.t - 1 - j);
          }
          ++counts[o];
        }
        for (std::size_t o = 0; o < dt; ++o) {
          data.frequencies[i][o] = static_cast<double>(counts[o]) / static_cast<double>(options.shots_per_setting);
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& th : threads) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return data;
}

TomographyData exact_tomography_data(const JuntaView& view, QubitSubset t, const NoiseModel& noise, int max_qubits) {
  noise.validate();
  const SubRegister reg = make_register(view, t, max_qubits);
  const QubitSubset noisy = noise.noisy_qubits(view.num_qubits());
  TomographyData data;
  data.t = t;
  data.settings = tomography_settings(reg.t);
  const std::size_t dt = std::size_t{1} << reg.t;
  const std::size_t dm = std::size_t{1} << reg.m;
  for (const auto& s : data.settings) {
    std::vector<double> p(dt, 0.0);
    for (std::size_t c = 0; c < dm; ++c) {
      const auto pc = outcome_probabilities(reg, s, c);
      for (std::size_t o = 0; o < dt; ++o) p[o] += pc[o] / static_cast<double>(dm);
    }
    apply_flip_noise(p, flip_rates(reg, s, noise, noisy));
    data.frequencies.push_back(std::move(p));
  }
  return data;
}

ChoiMatrix exact_subprocess_choi(const JuntaView& view, QubitSubset t, int max_qubits) {
  const SubRegister reg = make_register(view, t, max_qubits);
  const std::size_t dt = std::size_t{1} << reg.t;
  const std::size_t dm = std::size_t{1} << reg.m;
  const auto d = static_cast<Eigen::Index>(dt);
  const Matrix mixed = Matrix::Identity(static_cast<Eigen::Index>(dm), static_cast<Eigen::Index>(dm)) /
                       static_cast<double>(dm);
  Matrix j = Matrix::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      Matrix unit = Matrix::Zero(d, d);
      unit(a, b) = 1.0;
      const Matrix x = kron(unit, mixed);
      Matrix y = Matrix::Zero(x.rows(), x.cols());
      for (const auto& k : reg.kraus) y.noalias() += k * x * k.adjoint();
      j += kron(trace_second(y, dt, dm), unit);
    }
  }
  return ChoiMatrix(reg.t, 0.5 * (j + j.adjoint()));
}

Matrix project_cptp(const Matrix& j, int num_qubits, const ProjectionOptions& options, int* iterations) {
  const std::size_t d = std::size_t{1} << num_qubits;
  const auto size = static_cast<Eigen::Index>(d * d);
  if (j.rows() != size || j.cols() != size) throw ValidationError("project_cptp: matrix size does not match qubits");

  Matrix x = 0.5 * (j + j.adjoint());
  Matrix p = Matrix::Zero(size, size);
  Matrix q = Matrix::Zero(size, size);
  int it = 0;
  while (it < options.max_iterations) {
    ++it;
    const Matrix y = tp_project(x + p, d);
    p = x + p - y;
    Matrix next = project_psd(y + q);
    next = 0.5 * (next + next.adjoint());
    q = y + q - next;
    const double change = (next - x).norm();
    x = std::move(next);
    if (change < options.tolerance) break;
  }
  if (iterations != nullptr) *iterations = it;

  // Land exactly on the TP subspace, then mix with the completely
  // depolarizing Choi I/D until no eigenvalue is negative.
  x = tp_project(x, d);
  const double lambda_min = hermitian_eigenvalues(x)(0);
  if (lambda_min < 0.0) {
    const double floor = 1.0 / static_cast<double>(d);
    const double w = -lambda_min / (floor - lambda_min);
    x = (1.0 - w) * x + w * floor * Matrix::Identity(size, size);
  }
  return x;
}

ReconstructionResult reconstruct_cptp(const TomographyData& data, const ProjectionOptions& options) {
  const int t = data.t.size();
  if (t < 1) throw ValidationError("reconstruct_cptp: empty target set");
  const auto expected = tomography_settings(t);
  if (data.settings.size() != expected.size() || data.frequencies.size() != expected.size()) {
    throw ValidationError("reconstruct_cptp: incomplete setting grid");
  }
  const std::size_t dt = std::size_t{1} << t;
  const auto d = static_cast<Eigen::Index>(dt);
  const auto basis = pauli_basis(t);
  const auto nb = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index params = nb * nb;

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(params, params);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(params);
  Eigen::VectorXd row(params);
  Eigen::VectorXd meas(nb);
  Eigen::VectorXd prep(nb);
  for (std::size_t i = 0; i < data.settings.size(); ++i) {
    const auto& s = data.settings[i];
    if (data.frequencies[i].size() != dt) throw ValidationError("reconstruct_cptp: wrong outcome count");
    Matrix rho = Matrix::Identity(1, 1);
    for (auto in : s.inputs) rho = kron(rho, input_density(in));
    const Matrix rho_t = rho.transpose();
    for (Eigen::Index y = 0; y < nb; ++y) prep(y) = (basis[static_cast<std::size_t>(y)] * rho_t).trace().real();
    const Matrix w = product_rotation(s);
    for (Eigen::Index o = 0; o < d; ++o) {
      const Vector e = w.adjoint().col(o);
      const Matrix proj = e * e.adjoint();
      for (Eigen::Index x = 0; x < nb; ++x) meas(x) = (basis[static_cast<std::size_t>(x)] * proj).trace().real();
      for (Eigen::Index x = 0; x < nb; ++x) row.segment(x * nb, nb) = meas(x) * prep / static_cast<double>(d);
      gram.noalias() += row * row.transpose();
      rhs += row * data.frequencies[i][static_cast<std::size_t>(o)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double top = es.eigenvalues().maxCoeff();
  if (!(es.eigenvalues().minCoeff() > 1e-12 * top)) {
    throw Error("reconstruct_cptp: design matrix is rank deficient");
  }
  const Eigen::VectorXd theta = es.eigenvectors() * (es.eigenvalues().cwiseInverse().asDiagonal() *
                                                     (es.eigenvectors().transpose() * rhs));

  Matrix j = Matrix::Zero(d * d, d * d);
  for (Eigen::Index x = 0; x < nb; ++x) {
    for (Eigen::Index y = 0; y < nb; ++y) {
      const double c = theta(x * nb + y);
      if (c == 0.0) continue;
      j += (c / static_cast<double>(d)) * kron(basis[static_cast<std::size_t>(x)], basis[static_cast<std::size_t>(y)]);
    }
  }

  int iterations = 0;
  Matrix projected = project_cptp(j, t, options, &iterations);
  ChoiMatrix choi(t, projected);
  ReconstructionResult out{choi, choi_to_chi(choi), iterations, hermitian_eigenvalues(projected)(0),
                           tp_deviation(projected, dt), std::nullopt, std::nullopt};
  return out;
}

void compare_to_reference(ReconstructionResult& result, const ChiMatrix& reference) {
  result.distance = process_distance(result.chi, reference);
  result.fidelity = process_fidelity(result.chi, reference);
}

LearnerOutput junta_learner(const InfluenceSampler& sampler, const SamplerConfig& config, double delta,
                            const TomographyOptions& tomography, bool with_reference) {
  LearnerOutput out;
  out.hiqi = hiqi(sampler, config, delta);
  out.t = out.hiqi.t;
  out.epsilon = junta_epsilon_estimate(out.hiqi.iu_complement, out.hiqi.iu_complement_stderr);
  if (out.t.empty()) return out;

  const auto data = generate_tomography_data(sampler.view(), out.t, sampler.noise(), tomography);
  out.reconstruction = reconstruct_cptp(data);
  if (with_reference) {
    compare_to_reference(*out.reconstruction,
                         choi_to_chi(exact_subprocess_choi(sampler.view(), out.t, tomography.max_qubits)));
    out.epsilon_r = out.reconstruction->distance;
    out.total_bound = out.epsilon.value + *out.epsilon_r;
  }
  return out;
}

}  // namespace infsamp
