#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mlfgm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// One of the two graphs being matched. All attribute layers share a single
// directed edge topology; only the attribute values differ per layer.
// Attribute columns are indexed like the entity they describe, one column per
// vertex / edge; the row dimension may differ between layers.
struct MultiLayerGraph {
  int n_vertices = 0;
  int n_layers = 0;
  std::vector<std::pair<int, int>> intra_edges;  // directed (i, j), i != j
  std::vector<MatrixXd> vertex_attrs;            // per layer: dim x n_vertices
  std::vector<MatrixXd> edge_attrs;              // per layer: dim x n_edges

  int n_edges() const { return int(intra_edges.size()); }
  void validate() const;  // throws std::invalid_argument
};

// Candidate correspondence between the two vertex sets. Continuous instances
// are doubly substochastic, binary ones partial permutations.
struct Assignment {
  MatrixXd matrix;
  bool binary = false;

  void validate() const;
  static Assignment uniform(int n1, int n2);
  // row_to_col[i] = matched column of row i, or -1 for unmatched.
  static Assignment from_permutation(const std::vector<int>& row_to_col,
                                     int n1, int n2);
};

// Which vertex pairs of one graph carry cross-layer affinities. The default
// couples each vertex's layers with themselves (one self pair per vertex).
struct InterEdgeSpec {
  bool self_loops = true;
  std::vector<std::pair<int, int>> pairs;  // used when !self_loops

  std::vector<std::pair<int, int>> edges(int n_vertices) const;
};

// Ordered layer pairs (a, b), a != b, in lexicographic order. Cross-layer
// affinity blocks are indexed by position in this list.
std::vector<std::pair<int, int>> layer_pairs(int n_layers);

// Affinity blocks between the two graphs, in the index conventions of the
// corresponding edge lists. Kp[a] pairs vertices within layer a, Kqi[a] pairs
// intra edges within layer a, Kqt[p] pairs inter edges across layer_pairs[p].
struct LayerAffinities {
  std::vector<MatrixXd> Kp;   // n_layers blocks, n1 x n2
  std::vector<MatrixXd> Kqi;  // n_layers blocks, m1i x m2i
  std::vector<MatrixXd> Kqt;  // n_layers*(n_layers-1) blocks, m1t x m2t

  void validate(int n_layers) const;
};

// A full matching instance. Affinity block shapes must agree with the graphs
// and the inter-edge specs. orig_n1/orig_n2 record the vertex counts before
// dummy padding (equal to the current counts when nothing was padded).
struct MatchingProblem {
  MultiLayerGraph g1, g2;
  InterEdgeSpec inter1, inter2;
  LayerAffinities aff;
  std::vector<std::pair<int, int>> ground_truth;  // empty when unknown

  int orig_n1 = 0, orig_n2 = 0;

  void validate() const;
};

namespace detail {
[[noreturn]] inline void fail(const std::string& msg) {
  throw std::invalid_argument(msg);
}
}  // namespace detail

}  // namespace mlfgm
