#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <bit>
#include <string>
#include <vector>

#include "infsamp/channels.hpp"
#include "infsamp/errors.hpp"
#include "infsamp/inference.hpp"
#include "infsamp/influence.hpp"
#include "infsamp/process.hpp"
#include "infsamp/runner.hpp"

namespace py = pybind11;
using namespace infsamp;

namespace {

int qubits_of_chi(const Matrix& m) {
  const auto size = static_cast<std::uint64_t>(m.rows());
  if (m.rows() != m.cols() || size == 0 || !std::has_single_bit(size) || std::countr_zero(size) % 2 != 0) {
    throw ValidationError("process matrix must be 4^n x 4^n");
  }
  return std::countr_zero(size) / 2;
}

ChiMatrix to_chi(const Matrix& m) { return ChiMatrix(qubits_of_chi(m), m); }

QubitSubset to_subset(const std::vector<int>& qubits) { return QubitSubset::from_qubits(qubits); }

ProcessSpec parse_process(const std::string& process_json) {
  runner::json cfg;
  cfg["process"] = runner::json::parse(process_json);
  return runner::parse_config(cfg).process;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Influence sampling for n-qubit quantum processes";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<CapabilityError>(m, "CapabilityError", base.ptr());
  py::register_exception<SizeError>(m, "SizeError", base.ptr());

  m.def(
      "run_json",
      [](const std::string& command, const std::string& config_json) {
        const auto config = runner::json::parse(config_json);
        py::gil_scoped_release release;
        return runner::execute(command, config).dump();
      },
      py::arg("command"), py::arg("config_json"), "Run a workflow; config and envelope are JSON text.");

  m.def(
      "render_csv",
      [](const std::string& envelope_json) { return runner::render_csv(runner::json::parse(envelope_json)); },
      py::arg("envelope_json"));

  m.def("commands", &runner::command_names);

  m.def(
      "process_chi",
      [](const std::string& process_json, int max_qubits) {
        return embed_dense(parse_process(process_json), max_qubits).entries();
      },
      py::arg("process_json"), py::arg("max_qubits") = kDefaultDenseQubitCap,
      "Dense process matrix of a process given as JSON text.");

  m.def(
      "kraus_to_chi",
      [](const std::vector<Matrix>& ops) {
        if (ops.empty()) throw ValidationError("need at least one Kraus operator");
        const auto d = static_cast<std::uint64_t>(ops.front().rows());
        if (!std::has_single_bit(d)) throw ValidationError("Kraus operators must be 2^n x 2^n");
        return kraus_to_chi(KrausSet(std::countr_zero(d), ops)).entries();
      },
      py::arg("kraus"));

  m.def(
      "influence",
      [](const Matrix& chi, const std::vector<int>& subset) { return influence_exact(to_chi(chi), to_subset(subset)); },
      py::arg("chi"), py::arg("subset"));

  m.def(
      "influence_samplers",
      [](const Matrix& chi, const std::vector<int>& subset) {
        const auto s = influence_samplers_exact(to_chi(chi), to_subset(subset));
        return std::vector<double>(s.begin(), s.end());
      },
      py::arg("chi"), py::arg("subset"));

  m.def(
      "influence_bounds",
      [](const std::vector<double>& samplers) {
        if (samplers.size() != 2 && samplers.size() != 3) throw ValidationError("expected 2 or 3 sampler values");
        SamplerTriple t{samplers[0], samplers[1], samplers.size() == 3 ? samplers[2] : 0.0};
        const auto b = influence_bounds(t, samplers.size() == 3 ? BoundMode::ThreeGate : BoundMode::TwoGate);
        return std::pair<double, double>{b.lower, b.upper};
      },
      py::arg("samplers"), "(lower, upper) from two or three sampler values.");

  m.def("junta_epsilon", &junta_epsilon, py::arg("iu"));

  m.def(
      "process_fidelity", [](const Matrix& a, const Matrix& b) { return process_fidelity(to_chi(a), to_chi(b)); },
      py::arg("a"), py::arg("b"));

  m.def(
      "process_distance", [](const Matrix& a, const Matrix& b) { return process_distance(to_chi(a), to_chi(b)); },
      py::arg("a"), py::arg("b"));

  m.attr("__version__") = INFSAMP_VERSION;
}
