#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>

#include "mlfgm/bench.hpp"
#include "mlfgm/problem_io.hpp"
#include "mlfgm/solver.hpp"
#include "mlfgm/synthetic.hpp"
#include "mlfgm/verify.hpp"

namespace py = pybind11;
using namespace mlfgm;

PYBIND11_MODULE(_core, m) {
  m.doc() = "multi-layer factorized graph matching";

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("theta_step", &SolverConfig::theta_step)
      .def_readwrite("fw_max_iters", &SolverConfig::fw_max_iters)
      .def_readwrite("fw_gap_tol", &SolverConfig::fw_gap_tol)
      .def_readwrite("confidence_update", &SolverConfig::confidence_update)
      .def_readwrite("lc_floor", &SolverConfig::lc_floor)
      .def_readwrite("modified_fw", &SolverConfig::modified_fw)
      .def_readwrite("svd_rel_tol", &SolverConfig::svd_rel_tol);

  py::class_<MatchingProblem>(m, "Problem")
      .def_property_readonly("n_vertices",
                             [](const MatchingProblem& p) {
                               return py::make_tuple(p.g1.n_vertices,
                                                     p.g2.n_vertices);
                             })
      .def_property_readonly(
          "n_layers", [](const MatchingProblem& p) { return p.g1.n_layers; })
      .def_readonly("ground_truth", &MatchingProblem::ground_truth)
      .def("__repr__", [](const MatchingProblem& p) {
        return "Problem(" + std::to_string(p.g1.n_vertices) + "x" +
               std::to_string(p.g2.n_vertices) + " vertices, " +
               std::to_string(p.g1.n_layers) + " layers)";
      });

  py::class_<MethodRun>(m, "MatchResult")
      .def_property_readonly(
          "assignment",
          [](const MethodRun& r) { return r.assignment.matrix; })
      .def_readonly("objective", &MethodRun::objective)
      .def_readonly("objective_final", &MethodRun::objective_final)
      .def_property_readonly(
          "layer_confidence",
          [](const MethodRun& r) { return r.layer_confidence; })
      .def_readonly("wall_time_ms", &MethodRun::wall_time_ms)
      .def_readonly("warning", &MethodRun::warning);

  m.def(
      "generate_problem",
      [](int inliers, int outliers, int attributes, double deformation,
         double sigma_sq, double omega_min, double omega_max, double coupling,
         std::uint64_t seed) {
        SyntheticParams sp;
        sp.n_inliers = inliers;
        sp.n_outliers = outliers;
        sp.n_attributes = attributes;
        sp.deformation = deformation;
        sp.sigma_sq = sigma_sq;
        sp.omega_min = omega_min;
        sp.omega_max = omega_max;
        sp.coupling = coupling;
        sp.seed = seed;
        return make_synthetic_problem(sp);
      },
      "Seeded synthetic matching instance with known ground truth.",
      py::arg("inliers") = 20, py::arg("outliers") = 0,
      py::arg("attributes") = 5, py::arg("deformation") = 0.0,
      py::arg("sigma_sq") = 0.3, py::arg("omega_min") = 0.1,
      py::arg("omega_max") = 1.0, py::arg("coupling") = 1.0,
      py::arg("seed") = 0);

  m.def("load_problem", &load_problem, "Read a problem file.",
        py::arg("path"));
  m.def(
      "save_problem",
      [](const std::string& path, const MatchingProblem& p) {
        save_problem(path, p);
      },
      "Write a problem file.", py::arg("path"), py::arg("problem"));

  m.def(
      "solve",
      [](const MatchingProblem& p, const std::string& method,
         const SolverConfig& config) {
        return run_method(p, parse_method(method), config);
      },
      "Match the two graphs; method is mlfgm, sm-integrated, or "
      "sm-single-best.",
      py::arg("problem"), py::arg("method") = "mlfgm",
      py::arg("config") = SolverConfig{});

  m.def(
      "accuracy",
      [](const MatchingProblem& p, const MethodRun& r) {
        return accuracy(r.assignment, p.ground_truth);
      },
      "Fraction of the problem's ground-truth pairs kept by the result.",
      py::arg("problem"), py::arg("result"));

  m.def(
      "verify",
      [](std::uint64_t seed) {
        py::list out;
        for (const CheckResult& c : run_verification(seed)) {
          out.append(py::make_tuple(c.name, c.passed, c.detail));
        }
        return out;
      },
      "Run the library's seeded property checks; returns "
      "(name, passed, detail) tuples.",
      py::arg("seed") = 0);
}
