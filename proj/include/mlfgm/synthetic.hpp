#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mlfgm/affinity.hpp"
#include "mlfgm/types.hpp"

namespace mlfgm {

struct SyntheticParams {
  int n_inliers = 20;
  int n_outliers = 0;
  int n_attributes = 5;  // one attribute layer per attribute
  double deformation = 0.0;
  double sigma_sq = 0.3;
  double omega_min = 0.1;
  double omega_max = 1.0;
  double coupling = 1.0;  // constant inter-layer affinity
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticPair {
  MultiLayerGraph g1, g2;
  std::vector<std::pair<int, int>> ground_truth;  // inlier i <-> i
  std::vector<double> omegas;                     // per-layer kernel weight
};

// Draws a base graph with n_inliers vertices, fully connected directed edges,
// and per-layer scalar edge attributes uniform in [0,1]; both copies receive
// independent Gaussian N(0, deformation^2) attribute noise and n_outliers
// fresh random vertices each. Attributes are symmetric across the two
// directions of each vertex pair so integrated affinities stay symmetric.
SyntheticPair generate_synthetic_pair(const SyntheticParams& params);

// Full problem: generated pair plus kernel affinities (no unary term) and
// default self-loop inter-layer wiring.
MatchingProblem make_synthetic_problem(const SyntheticParams& params);

// Fraction of ground-truth pairs (i, a) with X(i, a) = 1; assignments outside
// the ground truth (e.g. of outliers) are neither rewarded nor penalized.
double accuracy(const Assignment& X,
                const std::vector<std::pair<int, int>>& ground_truth);

}  // namespace mlfgm
