#pragma once

#include <Eigen/Dense>
#include <utility>

#include "mlfgm/factorization.hpp"
#include "mlfgm/incidence.hpp"
#include "mlfgm/types.hpp"

namespace mlfgm {

// Classical Lawler-form affinity matrix over candidate match pairs. Entry
// K[ia, jb] couples the match (i -> a) with the match (j -> b), where the
// flat index of (i, a) is a * n1 + i (column-major over an n1 x n2 grid).
struct SingleLayerProblem {
  Eigen::MatrixXd K;
  int n1 = 0;
  int n2 = 0;

  void validate() const;
};

// Assembles the integrated affinities into the dense pair-affinity matrix:
// diagonal from the unary block, off-diagonal from the pairwise block mapped
// through the two edge lists.
SingleLayerProblem build_single_layer(const Eigen::MatrixXd& Kp_int,
                                      const Eigen::MatrixXd& Kq_int,
                                      const EdgeIncidence& edges1,
                                      const EdgeIncidence& edges2);

// Convenience: integrate a multi-layer problem's intra-layer affinities
// (entrywise sums, inter-layer blocks dropped) and assemble.
SingleLayerProblem build_single_layer(const MatchingProblem& problem);

struct SpectralInfo {
  bool converged = false;
  int iters = 0;
  Eigen::MatrixXd score;  // principal eigenvector reshaped to n1 x n2
};

// Spectral matching: principal eigenvector of K by power iteration
// (all-ones start, tolerance 1e-8, max 1000 iterations), reshaped to the
// match grid and discretized by the Hungarian method.
Assignment spectral_match(const SingleLayerProblem& problem,
                          SpectralInfo* info = nullptr);

// Exact maximizers by permutation enumeration; square problems with
// n <= 8 only.
std::pair<Assignment, double> brute_force_qap(const SingleLayerProblem& problem);
std::pair<Assignment, double> brute_force_qap(const FactorizedProblem& fp,
                                              const Eigen::VectorXd& lc);
std::pair<Assignment, double> brute_force_qap(const FactorizedProblem& fp);

}  // namespace mlfgm
