#pragma once

#include "mlfgm/types.hpp"

namespace mlfgm {

// Start / end selection matrices of an edge list: G(v, m) = 1 iff edge m
// starts at vertex v, H(v, m) = 1 iff it ends there. src/dst keep the raw
// indices for gather loops; G and H are the same data in matrix form.
struct EdgeIncidence {
  MatrixXd G, H;  // n_vertices x n_edges, binary
  std::vector<int> src, dst;

  int n_edges() const { return int(src.size()); }
};

EdgeIncidence build_edge_incidence(int n_vertices,
                                   const std::vector<std::pair<int, int>>& edges);

// Selection matrices of a graph's inter-layer edge set. Under the self-loop
// default G and H coincide with the identity.
EdgeIncidence build_inter_edge_incidence(int n_vertices, const InterEdgeSpec& spec);

// Layer selection matrices. Within-layer blocks couple each layer with itself
// (LGi = LHi = I). Cross-layer blocks couple ordered layer pairs: column p of
// LGt marks the source layer of layer_pairs[p], LHt its target layer.
struct LayerIncidence {
  MatrixXd LGi, LHi;  // n_layers x n_layers
  MatrixXd LGt, LHt;  // n_layers x n_layers*(n_layers-1)
  std::vector<std::pair<int, int>> pairs;
};

LayerIncidence build_layer_incidence(int n_layers);

// All selection matrices of one problem instance.
struct IncidenceBundle {
  EdgeIncidence intra1, intra2;
  EdgeIncidence inter1, inter2;
  LayerIncidence layers;
};

IncidenceBundle build_incidence_bundle(const MatchingProblem& p);

}  // namespace mlfgm
