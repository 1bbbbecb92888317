#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlfgm/solver.hpp"
#include "mlfgm/synthetic.hpp"

namespace mlfgm {

enum class Method { mlfgm, sm_integrated, sm_single_best };

// Throws std::invalid_argument listing the valid names on a bad name.
Method parse_method(const std::string& name);
std::string method_name(Method m);

struct MethodRun {
  Assignment assignment;        // original (unpadded) sizes
  double objective = 0.0;       // f_gm of the assignment, uniform confidence
  double objective_final = 0.0; // mlfgm: f_gm at the solver's final confidence
  Eigen::VectorXd layer_confidence;  // mlfgm only, empty otherwise
  double wall_time_ms = 0.0;
  bool warning = false;  // iteration caps hit or discretization forced
};

// Runs one method on one problem. The objective is always evaluated on the
// multi-layer problem with uniform confidence so methods are comparable.
MethodRun run_method(const MatchingProblem& problem, Method method,
                     const SolverConfig& solver_cfg);

struct TrialRecord {
  std::uint64_t seed = 0;  // problem seed (shared by all methods of a trial)
  Method method = Method::mlfgm;
  double sweep_value = 0.0;
  double accuracy = 0.0;
  double objective = 0.0;
  double wall_time_ms = 0.0;
};

struct ExperimentConfig {
  std::string kind = "deformation";  // deformation | outlier | attributes
  SyntheticParams base;
  int trials = 30;
  std::vector<Method> methods{Method::mlfgm, Method::sm_integrated};
  SolverConfig solver;
  // When true, the kind's standard fixed parameters are applied over `base`
  // (deformation: n_in=20, n_out=2; outlier: n_in=20, eps=0.1;
  //  attributes: n_in=20, n_out=4, eps=0.15).
  bool use_standard_fixed_params = true;
  std::vector<double> sweep_values;  // empty = the kind's standard range
};

struct BenchResult {
  std::string sweep_variable;
  std::vector<double> points;
  std::vector<Method> methods;
  std::vector<std::vector<double>> mean;    // [method][point]
  std::vector<std::vector<double>> stddev;  // [method][point]
  int trials = 0;
  std::vector<TrialRecord> rows;            // point-major, then trial, then method
  std::vector<double> wall_time_ms;         // per method, summed over rows
  bool any_warning = false;
};

// Standard sweep range for a kind (deformation 0:0.05:0.3, outliers 0:2:10,
// attributes 4:2:16).
std::vector<double> standard_sweep(const std::string& kind);

BenchResult run_experiment(const ExperimentConfig& cfg);

// CSV: header "seed,method,sweep_value,accuracy,objective" plus a
// wall_time_ms column when include_timings is set; one row per trial record.
// Identical configs and seeds produce byte-identical text iff timings are off.
std::string bench_csv(const BenchResult& result, bool include_timings = false);

// Compact JSON summary: sweep points and per-method mean/std curves.
std::string bench_summary_json(const BenchResult& result);

// Spearman rank correlation with average ranks for ties.
double spearman_rho(const std::vector<double>& x, const std::vector<double>& y);

// One-sided exact permutation test over all |x|! orderings of y; returns the
// probability of a rank correlation at most as large as the observed one
// (alternative: negative association). Requires |x| <= 8.
struct SpearmanTest {
  double rho = 0.0;
  double p_value = 1.0;
};
SpearmanTest spearman_test_negative(const std::vector<double>& x,
                                    const std::vector<double>& y);

}  // namespace mlfgm
