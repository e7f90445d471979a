#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>

#include "remu/benchmarks.hpp"
#include "remu/corrected.hpp"
#include "remu/diagnostics.hpp"
#include "remu/tn_experiment.hpp"

namespace py = pybind11;
using namespace remu;

namespace {

SetSize parse_set_size(const std::string& s) {
  if (s == "n+3") return SetSize::n_plus_3;
  if (s == "2n+1") return SetSize::two_n_plus_1;
  throw std::invalid_argument("set_size must be 'n+3' or '2n+1'");
}

SolverConfig make_config(std::size_t max_evals, double delta0, const std::string& set_size) {
  SolverConfig cfg;
  cfg.max_evals = max_evals;
  cfg.delta0 = delta0;
  cfg.set_size = parse_set_size(set_size);
  return cfg;
}

SolverResult dispatch(const Objective& f, const Vector& x0, const SolverConfig& cfg, const std::string& weights,
                      const std::string& label) {
  if (weights == "corrected") return run_corrected(f, x0, cfg, CoefficientMenu(), {}, label);
  return run(f, x0, cfg, parse_weights(weights), label);
}

ProfileTable table_from(const std::vector<std::vector<double>>& evals, const std::vector<int>& dims,
                        const std::vector<std::string>& solvers) {
  ProfileTable t;
  t.solvers = solvers;
  for (std::size_t p = 0; p < dims.size(); ++p) t.problems.push_back({"p" + std::to_string(p), dims[p]});
  t.evals = evals;
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "ReMU derivative-free trust-region toolkit";

  py::class_<WeightCoefficients>(m, "WeightCoefficients")
      .def(py::init<double, double, double>(), py::arg("c1"), py::arg("c2"), py::arg("c3"))
      .def_property_readonly("c1", &WeightCoefficients::c1)
      .def_property_readonly("c2", &WeightCoefficients::c2)
      .def_property_readonly("c3", &WeightCoefficients::c3)
      .def_static("frobenius", &WeightCoefficients::frobenius)
      .def_static("barycentric", &WeightCoefficients::barycentric)
      .def("__eq__", [](const WeightCoefficients& a, const WeightCoefficients& b) { return a == b; })
      .def("__repr__", [](const WeightCoefficients& w) { return "WeightCoefficients(" + format_weights(w) + ")"; });

  m.def("parse_weights", &parse_weights, py::arg("text"));
  m.def("standard_weight_rows", &standard_weight_rows);

  m.def("_registry_json", [] { return registry_json().dump(); });
  m.def("variants", [] {
    std::vector<std::string> out;
    for (Variant v : all_variants()) out.push_back(to_string(v));
    return out;
  });
  m.def(
      "objective",
      [](const std::string& problem, const std::string& variant, double sigma, std::uint64_t seed,
         const Vector& x) { return make_objective({find_problem(problem), parse_variant(variant), sigma, seed})(x); },
      py::arg("problem"), py::arg("variant") = "smooth", py::arg("sigma") = 1e-2, py::arg("seed") = 0, py::arg("x"));

  m.def(
      "_solve_problem",
      [](const std::string& problem, const std::string& variant, const std::string& weights, double budget_mult,
         std::uint64_t seed, double sigma, const std::string& set_size) {
        const TestProblem prob{find_problem(problem), parse_variant(variant), sigma, seed};
        const auto budget = static_cast<std::size_t>(std::ceil(budget_mult * (prob.base.n + 1)));
        SolverConfig cfg = make_config(budget, 0.0, set_size);
        cfg.rng_seed = seed;
        py::gil_scoped_release release;
        return to_json(dispatch(make_objective(prob), prob.base.x0, cfg, weights, prob.key())).dump();
      },
      py::arg("problem"), py::arg("variant"), py::arg("weights"), py::arg("budget_mult"), py::arg("seed"),
      py::arg("sigma"), py::arg("set_size"));

  m.def(
      "_minimize",
      [](const std::function<double(const Vector&)>& fun, const Vector& x0, const std::string& weights,
         std::size_t max_evals, double delta0, const std::string& set_size) {
        return to_json(dispatch(fun, x0, make_config(max_evals, delta0, set_size), weights, "")).dump();
      },
      py::arg("fun"), py::arg("x0"), py::arg("weights"), py::arg("max_evals"), py::arg("delta0"),
      py::arg("set_size"));

  m.def(
      "eta_coefficients",
      [](const WeightCoefficients& C, int n, double r) {
        const auto e = eta_coefficients(C, n, r);
        return py::make_tuple(e.eta1, e.eta2, e.eta3, e.eta4, e.eta5);
      },
      py::arg("weights"), py::arg("n"), py::arg("r"));

  m.def(
      "limiting_error_terms",
      [](double c1, double c2, int n, double eps, const std::string& form) {
        const auto e = limiting_error_terms({c1, c2}, n, eps, form == "exact" ? ErrorForm::exact : ErrorForm::printed);
        return py::make_tuple(e.e1, e.e2);
      },
      py::arg("c1"), py::arg("c2"), py::arg("n"), py::arg("eps"), py::arg("form") = "printed");

  m.def(
      "performance_profile",
      [](const std::vector<std::vector<double>>& evals, const std::vector<int>& dims,
         const std::vector<std::string>& solvers, const std::vector<double>& alpha) {
        return performance_profile(table_from(evals, dims, solvers), alpha);
      },
      py::arg("evals"), py::arg("dims"), py::arg("solvers"), py::arg("alpha"));
  m.def(
      "data_profile",
      [](const std::vector<std::vector<double>>& evals, const std::vector<int>& dims,
         const std::vector<std::string>& solvers, const std::vector<double>& beta) {
        return data_profile(table_from(evals, dims, solvers), beta);
      },
      py::arg("evals"), py::arg("dims"), py::arg("solvers"), py::arg("beta"));

  m.def(
      "tn_error",
      [](const std::string& problem, const std::string& variant, std::size_t iterations, std::uint64_t seed,
         double sigma) {
        TnExperimentConfig cfg;
        cfg.problem = {find_problem(problem), parse_variant(variant), sigma, seed};
        cfg.iterations = iterations;
        TnExperimentResult res;
        {
          py::gil_scoped_release release;
          res = tn_error_experiment(cfg);
        }
        py::dict out;
        for (std::size_t w = 0; w < res.weights.size(); ++w) out[py::str(format_weights(res.weights[w]))] = res.errors_for(w);
        return out;
      },
      py::arg("problem") = "osborne2", py::arg("variant") = "stoch_add_unif", py::arg("iterations") = 100,
      py::arg("seed") = 0, py::arg("sigma") = 1e-2);
}
