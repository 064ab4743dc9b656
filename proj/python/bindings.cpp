// Thin pybind11 layer. Matrices cross as complex128 numpy arrays.

#include "qsdlab/bch.hpp"
#include "qsdlab/boolean_oracle.hpp"
#include "qsdlab/experiments.hpp"
#include "qsdlab/oracle_register.hpp"
#include "qsdlab/quansdam.hpp"
#include "qsdlab/random.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace qsd;

namespace {

py::dict group_result(const GroupCommutatorResult& r) {
  py::dict d;
  d["approx"] = r.approx.matrix();
  d["target"] = r.target.matrix();
  d["defect"] = r.defect;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "qsdlab core bindings";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("expm", [](const Matrix& h, double t) { return expm_generator(HermitianGenerator(h), t).matrix(); },
        py::arg("h"), py::arg("t"), "exp(-i h t) for Hermitian h.");

  m.def("random_hermitian",
        [](Index dim, std::uint64_t seed, std::uint64_t stream) {
          CounterRng rng(seed, stream);
          return random_hermitian(dim, rng).matrix();
        },
        py::arg("dim"), py::arg("seed"), py::arg("stream") = 0);

  m.def("logical_index",
        [](const std::vector<int>& values, int arity) { return LogicalVector(arity, values).index(); },
        py::arg("values"), py::arg("arity") = 2);

  m.def("selective_phase",
        [](const std::vector<int>& values, double theta, int arity) {
          return selective_phase(LogicalVector(arity, values), theta).matrix();
        },
        py::arg("values"), py::arg("theta"), py::arg("arity") = 2);

  m.def("reference_overlaps",
        [](double theta, int K, const std::string& axis) {
          const StateVector zero = StateVector::basis_state(BasisTag::qudits(1, 2), 0);
          return reference_process(theta, K, zero, parse_axis(axis)).overlaps;
        },
        py::arg("theta"), py::arg("K"), py::arg("axis") = "x",
        "rho12(k) for k = 0..K of the single-qubit reference process.");

  m.def("gaussian_overlap",
        [](const std::array<double, 4>& a, const std::array<double, 4>& b) {
          return gaussian_overlap(GaussianPacketParams{a[0], a[1], a[2], a[3]},
                                  GaussianPacketParams{b[0], b[1], b[2], b[3]});
        },
        py::arg("a"), py::arg("b"), "|rho12| of packets given as (x, p, var, T).");

  m.def("oracle_equivalence",
        [](int n, std::uint64_t x0, double theta) {
          const EquivalenceReport r = oracle_equivalence(SearchOracleSpec(n, x0), theta);
          py::dict d;
          d["bfseq_vs_usual"] = r.bfseq_vs_usual;
          d["usual_vs_selective_phase"] = r.usual_vs_selective_phase;
          d["selective_bfseq_vs_usual"] = r.selective_bfseq_vs_usual;
          d["bfseq_vs_selective_phase"] = r.bfseq_vs_selective_phase;
          d["ancilla_leakage"] = r.ancilla_leakage;
          d["max_deviation"] = r.max_deviation();
          return d;
        },
        py::arg("n"), py::arg("x0"), py::arg("theta"));

  m.def("bch_group_commutator",
        [](const Matrix& a, const Matrix& b, double tau) {
          return group_result(bch_group_commutator(HermitianGenerator(a), HermitianGenerator(b), tau));
        },
        py::arg("a"), py::arg("b"), py::arg("tau"));

  m.def("trotter_repeat",
        [](const Matrix& a, const Matrix& b, double tau, int n) {
          return group_result(trotter_repeat(HermitianGenerator(a), HermitianGenerator(b), tau, n));
        },
        py::arg("a"), py::arg("b"), py::arg("tau"), py::arg("n"));

  m.def("experiment_names", &experiment_names);

  m.def("run_experiment",
        [](const std::string& name, const std::map<std::string, std::string>& config,
           std::optional<std::string> format, std::optional<std::uint64_t> seed) {
          ExperimentConfig cfg;
          for (const auto& [k, v] : config) cfg.set(k, v);
          const OutputFormat fmt = format ? parse_output_format(*format) : default_format(name);
          const ExperimentOutput out = run_experiment(name, cfg, fmt, seed);
          return py::make_tuple(out.text, out.tolerance_ok, out.message);
        },
        py::arg("name"), py::arg("config") = std::map<std::string, std::string>{},
        py::arg("format") = py::none(), py::arg("seed") = py::none(),
        "Returns (text, tolerance_ok, message).");
}
