#include "mlfgm/incidence.hpp"

namespace mlfgm {

EdgeIncidence build_edge_incidence(
    int n_vertices, const std::vector<std::pair<int, int>>& edges) {
  EdgeIncidence inc;
  int m = int(edges.size());
  inc.G = MatrixXd::Zero(n_vertices, m);
  inc.H = MatrixXd::Zero(n_vertices, m);
  inc.src.reserve(m);
  inc.dst.reserve(m);
  for (int e = 0; e < m; ++e) {
    auto [i, j] = edges[e];
    if (i < 0 || i >= n_vertices || j < 0 || j >= n_vertices)
      detail::fail("edge endpoint out of range");
    inc.G(i, e) = 1.0;
    inc.H(j, e) = 1.0;
    inc.src.push_back(i);
    inc.dst.push_back(j);
  }
  return inc;
}

EdgeIncidence build_inter_edge_incidence(int n_vertices,
                                         const InterEdgeSpec& spec) {
  return build_edge_incidence(n_vertices, spec.edges(n_vertices));
}

LayerIncidence build_layer_incidence(int n_layers) {
  if (n_layers < 1) detail::fail("need at least one layer");
  LayerIncidence li;
  li.LGi = MatrixXd::Identity(n_layers, n_layers);
  li.LHi = MatrixXd::Identity(n_layers, n_layers);
  li.pairs = layer_pairs(n_layers);
  int np = int(li.pairs.size());
  li.LGt = MatrixXd::Zero(n_layers, np);
  li.LHt = MatrixXd::Zero(n_layers, np);
  for (int p = 0; p < np; ++p) {
    li.LGt(li.pairs[p].first, p) = 1.0;
    li.LHt(li.pairs[p].second, p) = 1.0;
  }
  return li;
}

IncidenceBundle build_incidence_bundle(const MatchingProblem& p) {
  IncidenceBundle b;
  b.intra1 = build_edge_incidence(p.g1.n_vertices, p.g1.intra_edges);
  b.intra2 = build_edge_incidence(p.g2.n_vertices, p.g2.intra_edges);
  b.inter1 = build_inter_edge_incidence(p.g1.n_vertices, p.inter1);
  b.inter2 = build_inter_edge_incidence(p.g2.n_vertices, p.inter2);
  b.layers = build_layer_incidence(p.g1.n_layers);
  return b;
}

}  // namespace mlfgm
