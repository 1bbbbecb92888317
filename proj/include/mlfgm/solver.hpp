#pragma once

#include "mlfgm/hungarian.hpp"
#include "mlfgm/objective.hpp"

#include <cstdint>

namespace mlfgm {

struct SolverConfig {
  double theta_step = 0.01;
  int fw_max_iters = 200;
  double fw_gap_tol = 1e-6;
  bool confidence_update = true;
  double lc_floor = 1e-3;
  // Adds the best vertex seen so far as a second line-search candidate each
  // iteration; can escape shallow first-order stalls on the nonconcave legs.
  bool modified_fw = false;
  double svd_rel_tol = 1e-10;
  std::uint64_t seed = 0;  // reserved; the path solver itself is deterministic
};

struct ThetaTraceEntry {
  double theta;
  double f_theta;
  double f_gm;
  int fw_iters;
  double fw_gap;
};

struct SolveReport {
  Assignment assignment;   // binary, orig_n1 x orig_n2
  double objective = 0.0;  // f_gm of the padded solution at final confidence
  double objective_uniform = 0.0;  // same at uniform confidence
  VectorXd layer_confidence;
  std::vector<ThetaTraceEntry> trace;
  std::vector<VectorXd> lc_trace;
  MatrixXd x_continuous;  // final iterate before discretization (padded)
  double wall_time_ms = 0.0;
  bool hit_fw_max_iters = false;
  bool discretized = false;  // rounding was needed at the end of the path
};

// Maximizer of the quadratic through f_theta at gamma in {0, 1/2, 1} along
// X + gamma*(D - X), clamped to [0, 1]. The objective is exactly quadratic,
// so the fit is the restriction itself up to rounding.
double exact_line_search(const ObjectiveContext& ctx, const MatrixXd& X,
                         const MatrixXd& D);

struct FwResult {
  MatrixXd X;
  int iters = 0;
  double gap = 0.0;
  bool hit_max_iters = false;
  std::vector<double> values;  // f_theta after each accepted step
};

// Ascent over the doubly stochastic polytope: linearize, take the best
// permutation as direction, step by exact line search. Stops when the
// linearization gap drops below fw_gap_tol * max(1, |f_theta|).
FwResult frank_wolfe_max(const ObjectiveContext& ctx, MatrixXd X0,
                         const SolverConfig& cfg);

// Confidence of each layer in the discretized solution: mean affinity over
// edge pairs selected by the assignment minus mean over pairs selected by its
// complement. Raw values may be negative.
VectorXd layer_confidence_raw(const MatrixXd& X_binary, const FactorizedProblem& fp);

// Clamp to the floor and renormalize to sum 1 such that every entry stays at
// or above the floor.
VectorXd clamp_normalize_confidence(VectorXd raw, double lc_floor);

// Discretizes X by maximum-profit assignment, then applies raw + clamp.
VectorXd layer_confidence(const MatrixXd& X, const FactorizedProblem& fp,
                          double lc_floor);

// Path following over theta in [0, 1]: warm-started Frank-Wolfe per step,
// optional confidence reweighting between steps, final discretization.
SolveReport solve_mlfgm(const FactorizedProblem& fp, const SolverConfig& cfg);

// Convenience wrapper: pad, factorize, solve.
SolveReport solve_mlfgm(const MatchingProblem& p, const SolverConfig& cfg);

}  // namespace mlfgm
