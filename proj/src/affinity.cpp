#include "mlfgm/affinity.hpp"

#include <cmath>

namespace mlfgm {

double synthetic_edge_affinity(double r1, double r2, double omega,
                               double sigma_sq) {
  if (sigma_sq <= 0.0) detail::fail("sigma_sq must be positive");
  return std::exp(-((1.0 - omega) + omega * std::abs(r1 - r2)) / sigma_sq);
}

double synthetic_edge_affinity(const VectorXd& r1, const VectorXd& r2,
                               double omega, double sigma_sq) {
  if (sigma_sq <= 0.0) detail::fail("sigma_sq must be positive");
  if (r1.size() != r2.size()) detail::fail("attribute dimensions differ");
  return std::exp(-((1.0 - omega) + omega * (r1 - r2).norm()) / sigma_sq);
}

MatrixXd normalize_layer(const MatrixXd& block, bool* all_zero) {
  if (block.size() > 0 && block.minCoeff() < 0.0)
    detail::fail("affinity block has negative entries");
  double mx = block.size() > 0 ? block.maxCoeff() : 0.0;
  if (all_zero) *all_zero = (mx == 0.0);
  if (mx == 0.0) return block;
  return block / mx;
}

LayerAffinities build_layer_affinities(const MultiLayerGraph& g1,
                                       const MultiLayerGraph& g2,
                                       const InterEdgeSpec& inter1,
                                       const InterEdgeSpec& inter2,
                                       const KernelConfig& cfg,
                                       AffinityBuildInfo* info) {
  g1.validate();
  g2.validate();
  if (g1.n_layers != g2.n_layers) detail::fail("graphs disagree on layer count");
  int nl = g1.n_layers;
  if (int(cfg.omegas.size()) != nl)
    detail::fail("need one omega per layer");

  LayerAffinities aff;
  int n1 = g1.n_vertices, n2 = g2.n_vertices;
  int m1 = g1.n_edges(), m2 = g2.n_edges();

  for (int a = 0; a < nl; ++a) {
    MatrixXd kp = MatrixXd::Zero(n1, n2);
    if (cfg.unary) {
      for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i)
          kp(i, j) = synthetic_edge_affinity(g1.vertex_attrs[a].col(i),
                                             g2.vertex_attrs[a].col(j),
                                             cfg.omegas[a], cfg.sigma_sq);
    }
    aff.Kp.push_back(std::move(kp));

    MatrixXd kq(m1, m2);
    for (int f = 0; f < m2; ++f)
      for (int e = 0; e < m1; ++e)
        kq(e, f) = synthetic_edge_affinity(g1.edge_attrs[a].col(e),
                                           g2.edge_attrs[a].col(f),
                                           cfg.omegas[a], cfg.sigma_sq);
    if (cfg.normalize) {
      bool zero = false;
      kq = normalize_layer(kq, &zero);
      if (zero && info) info->all_zero_layers.push_back(a);
    }
    aff.Kqi.push_back(std::move(kq));
  }

  // Cross-layer blocks: a flat coupling of strength cfg.coupling on every
  // inter-edge pair, one block per ordered layer pair.
  int m1t = int(inter1.edges(n1).size());
  int m2t = int(inter2.edges(n2).size());
  int np = nl * (nl - 1);
  for (int p = 0; p < np; ++p)
    aff.Kqt.push_back(MatrixXd::Constant(m1t, m2t, cfg.coupling));

  aff.validate(nl);
  return aff;
}

IntegratedAffinity integrate_layers(const LayerAffinities& aff) {
  if (aff.Kp.empty() || aff.Kqi.empty())
    detail::fail("cannot integrate empty affinities");
  IntegratedAffinity out;
  out.Kp = MatrixXd::Zero(aff.Kp[0].rows(), aff.Kp[0].cols());
  out.Kq = MatrixXd::Zero(aff.Kqi[0].rows(), aff.Kqi[0].cols());
  for (const auto& b : aff.Kp) out.Kp += b;
  for (const auto& b : aff.Kqi) out.Kq += b;
  return out;
}

}  // namespace mlfgm
