#pragma once

#include "mlfgm/incidence.hpp"

namespace mlfgm {

// exp(-((1-omega) + omega*|r1 - r2|) / sigma_sq) on scalar attributes.
// Monotone non-increasing in |r1 - r2| for fixed omega > 0, so equal
// attributes score highest in every layer; at omega = 1 they score exactly 1.
// omega tunes how strongly disagreement is penalized against the constant
// bias term.
double synthetic_edge_affinity(double r1, double r2, double omega,
                               double sigma_sq);

// Vector attributes feed the Euclidean norm of the difference through the
// same formula.
double synthetic_edge_affinity(const VectorXd& r1, const VectorXd& r2,
                               double omega, double sigma_sq);

struct KernelConfig {
  double sigma_sq = 0.3;
  std::vector<double> omegas;  // one per layer
  bool unary = false;          // build Kp from vertex attributes instead of zeros
  double coupling = 1.0;       // constant cross-layer affinity value
  bool normalize = true;       // max-normalize each intra block
};

struct AffinityBuildInfo {
  std::vector<int> all_zero_layers;  // intra blocks skipped by normalization
};

// Kernel affinity blocks for a graph pair: per-layer Kp (optional) and Kqi
// from the attribute kernel, constant Kqt blocks on the inter-layer edges.
LayerAffinities build_layer_affinities(const MultiLayerGraph& g1,
                                       const MultiLayerGraph& g2,
                                       const InterEdgeSpec& inter1,
                                       const InterEdgeSpec& inter2,
                                       const KernelConfig& cfg,
                                       AffinityBuildInfo* info = nullptr);

// Scales a block so its largest entry becomes 1. All-zero blocks pass through
// unchanged and set *all_zero.
MatrixXd normalize_layer(const MatrixXd& block, bool* all_zero = nullptr);

// Entrywise sums of the per-layer blocks, for single-layer baselines. Blocks
// are expected to be normalized so no layer dominates by scale alone.
struct IntegratedAffinity {
  MatrixXd Kp, Kq;
};

IntegratedAffinity integrate_layers(const LayerAffinities& aff);

}  // namespace mlfgm
