#pragma once

#include "mlfgm/factorization.hpp"

namespace mlfgm {

// Evaluation state for one problem at a given layer confidence and theta.
// Confidence updates refresh the coupling and all confidence-weighted caches;
// the underlying factorized problem never changes.
struct ObjectiveContext {
  const FactorizedProblem* fp = nullptr;
  VectorXd lc;
  CouplingMatrices coupling;
  double theta = 0.0;

  // Confidence-weighted caches. Kp_w/Kqi_w/Kqt_w are the affinity blocks
  // collapsed across layers with the coupling diagonal; con_right_* weight the
  // right-hand curvature caches the same way.
  MatrixXd Kp_w, Kqi_w, Kqt_w;
  MatrixXd con_right_i, con_right_t;
  double sum_lam_i = 0.0, sum_lam_t = 0.0;

  ObjectiveContext(const FactorizedProblem& problem, VectorXd lc0,
                   double theta0);
  void set_layer_confidence(VectorXd lc_new);
  void set_theta(double t) { theta = t; }
};

// Quadratic form of the dense supra matrix over the layer-stacked candidate
// vector. The reference value the factorized paths are checked against.
double f_gm_dense(const MatrixXd& X, const VectorXd& lc, const MatrixXd& supra);

// Matching score: unary term plus coupling-weighted pairwise sums.
double f_gm(const MatrixXd& X, const ObjectiveContext& ctx);

// Curvature term; constant over full permutation matrices.
double f_con(const MatrixXd& X, const ObjectiveContext& ctx);

// Relaxed objectives, evaluated through their Frobenius-norm forms so that
// identity checks against f_gm/f_con exercise independent code paths.
// f_vex has negative semidefinite curvature, f_cav positive semidefinite.
double f_vex(const MatrixXd& X, const ObjectiveContext& ctx);
double f_cav(const MatrixXd& X, const ObjectiveContext& ctx);

// Path objective (1-theta)*f_vex + theta*f_cav, computed through the
// algebraically equal form f_gm + (theta - 1/2)*f_con.
double f_theta(const MatrixXd& X, const ObjectiveContext& ctx);

MatrixXd grad_f_theta(const MatrixXd& X, const ObjectiveContext& ctx);

// Literal factor-sum evaluations over the materialized A/B matrices,
// cross-checking the gather-based fast paths above.
double f_gm_via_factors(const MatrixXd& X, const ObjectiveContext& ctx);
double f_con_via_factors(const MatrixXd& X, const ObjectiveContext& ctx);

}  // namespace mlfgm
