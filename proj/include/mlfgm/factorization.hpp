#pragma once

#include "mlfgm/affinity.hpp"
#include "mlfgm/padding.hpp"

namespace mlfgm {

// Square-root split of a pairwise affinity concatenation K = U V^T, singular
// values absorbed symmetrically (U = L*sqrt(S), V = R*sqrt(S)). Values below
// rel_tol * s_max are dropped.
struct PairwiseSplit {
  MatrixXd U, V;
  int rank() const { return int(U.cols()); }
};

PairwiseSplit split_pairwise(const MatrixXd& K, double rel_tol = 1e-10);

// Layer coupling induced by a confidence vector: Lambda_i = LHi^T lc lc^T LGi
// for the within-layer terms, Lambda_t for the cross-layer terms. Only the
// diagonals enter the objective; Wi/Wt mirror them as row vectors.
struct CouplingMatrices {
  MatrixXd Lambda_i, Lambda_t;
  Eigen::RowVectorXd Wi, Wt;
};

CouplingMatrices build_coupling(const VectorXd& lc, const LayerIncidence& layers);

// Everything the objective needs, precomputed once per problem: selection
// matrices, concatenated affinity blocks, the factor split, the per-factor
// vertex-space matrices A/B, and curvature caches that do not depend on the
// layer confidence.
struct FactorizedProblem {
  IncidenceBundle inc;
  int n1 = 0, n2 = 0, n_layers = 0;
  int orig_n1 = 0, orig_n2 = 0;
  int m1i = 0, m2i = 0, m1t = 0, m2t = 0;

  MatrixXd Kp;   // n1 x n2*nl, unary blocks side by side
  MatrixXd Kqi;  // m1i x m2i*nl
  MatrixXd Kqt;  // m1t x m2t*nl*(nl-1)
  bool has_unary = false;

  PairwiseSplit intra;  // Kqi = U V^T
  PairwiseSplit inter;  // Kqt = S T^T

  // A1[m] = G1i diag(u_m) H1i^T; A2[m][n] = G2i diag(v_{m,n}) H2i^T where
  // v_{m,n} is the n-th per-layer segment of V's column m. B1/B2 likewise
  // from S/T over the inter-layer selection matrices and layer pairs.
  std::vector<MatrixXd> A1;
  std::vector<std::vector<MatrixXd>> A2;
  std::vector<MatrixXd> B1;
  std::vector<std::vector<MatrixXd>> B2;

  // Curvature caches: sums of A1[m] A1[m]^T etc., the only combinations the
  // curvature term and its gradient need.
  MatrixXd sumA1A1t, sumB1B1t;               // n1 x n1
  std::vector<MatrixXd> sumA2tA2, sumB2tB2;  // per layer block, n2 x n2

  CouplingMatrices coupling;  // at uniform confidence

  std::vector<std::pair<int, int>> pairs;  // ordered layer pairs

  Eigen::Block<const MatrixXd> kp_block(int a) const {
    return Kp.block(0, ptrdiff_t(a) * n2, n1, n2);
  }
  Eigen::Block<const MatrixXd> kqi_block(int a) const {
    return Kqi.block(0, ptrdiff_t(a) * m2i, m1i, m2i);
  }
  Eigen::Block<const MatrixXd> kqt_block(int p) const {
    return Kqt.block(0, ptrdiff_t(p) * m2t, m1t, m2t);
  }

  size_t stored_scalar_count() const;
};

// Expects a padded problem (n1 == n2). Builds concatenations, runs the factor
// split, materializes A/B and the curvature caches.
FactorizedProblem build_factorized_problem(const MatchingProblem& p,
                                           double svd_rel_tol = 1e-10);

// The supra affinity matrix over layer-stacked candidate vectors, assembled
// from the selection-matrix Kronecker identity. Guarded to
// nl * n1 * n2 <= 200; quadratic-form checks only.
MatrixXd assemble_dense_supra(const FactorizedProblem& fp);

size_t dense_supra_scalar_count(int n1, int n2, int n_layers);

}  // namespace mlfgm
