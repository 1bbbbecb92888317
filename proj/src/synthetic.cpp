#include "mlfgm/synthetic.hpp"

#include <algorithm>
#include <stdexcept>

#include "mlfgm/rng.hpp"

namespace mlfgm {

namespace {

using Eigen::MatrixXd;

// RNG stream ids, so adding draws to one stage never shifts another.
enum Stream : std::uint64_t {
  kOmegas = 0,
  kBaseAttrs = 1,
  kNoise1 = 2,
  kNoise2 = 3,
  kOutliers1 = 4,
  kOutliers2 = 5,
};

// Position of directed edge (i, j) in the fully connected edge list that
// enumerates i ascending, then j ascending with j != i.
inline int full_edge_pos(int i, int j, int n) {
  return i * (n - 1) + (j > i ? j - 1 : j);
}

std::vector<std::pair<int, int>> full_edge_list(int n) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(size_t(n) * size_t(n - 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i) edges.emplace_back(i, j);
    }
  }
  return edges;
}

}  // namespace

void SyntheticParams::validate() const {
  if (n_inliers < 1) detail::fail("synthetic: n_inliers must be at least 1");
  if (n_outliers < 0) detail::fail("synthetic: n_outliers must be nonnegative");
  if (n_attributes < 1) detail::fail("synthetic: n_attributes must be at least 1");
  if (!(deformation >= 0.0)) detail::fail("synthetic: deformation must be nonnegative");
  if (!(sigma_sq > 0.0)) detail::fail("synthetic: sigma_sq must be positive");
  if (!(omega_min > 0.0) || omega_min > omega_max || omega_max > 1.0) {
    detail::fail("synthetic: omega range must satisfy 0 < min <= max <= 1");
  }
  if (!(coupling >= 0.0)) detail::fail("synthetic: coupling must be nonnegative");
}

SyntheticPair generate_synthetic_pair(const SyntheticParams& params) {
  params.validate();
  const int n_in = params.n_inliers;
  const int n = n_in + params.n_outliers;
  const int nl = params.n_attributes;
  const int m = n * (n - 1);

  SyntheticPair out;
  out.omegas.resize(size_t(nl));
  {
    Rng rng(derive_seed(params.seed, kOmegas));
    for (int a = 0; a < nl; ++a) {
      out.omegas[size_t(a)] = rng.uniform(params.omega_min, params.omega_max);
    }
  }

  for (MultiLayerGraph* g : {&out.g1, &out.g2}) {
    g->n_vertices = n;
    g->n_layers = nl;
    g->intra_edges = full_edge_list(n);
    g->vertex_attrs.assign(size_t(nl), MatrixXd(0, n));
    g->edge_attrs.assign(size_t(nl), MatrixXd::Zero(1, m));
  }

  // Shared base attributes on inlier pairs, one value per unordered pair so
  // both directions carry the same attribute.
  Rng base(derive_seed(params.seed, kBaseAttrs));
  Rng noise1(derive_seed(params.seed, kNoise1));
  Rng noise2(derive_seed(params.seed, kNoise2));
  for (int a = 0; a < nl; ++a) {
    MatrixXd& e1 = out.g1.edge_attrs[size_t(a)];
    MatrixXd& e2 = out.g2.edge_attrs[size_t(a)];
    for (int i = 0; i < n_in; ++i) {
      for (int j = i + 1; j < n_in; ++j) {
        const double r = base.uniform01();
        const double r1 = r + params.deformation * noise1.gaussian();
        const double r2 = r + params.deformation * noise2.gaussian();
        e1(0, full_edge_pos(i, j, n)) = r1;
        e1(0, full_edge_pos(j, i, n)) = r1;
        e2(0, full_edge_pos(i, j, n)) = r2;
        e2(0, full_edge_pos(j, i, n)) = r2;
      }
    }
  }

  // Outlier vertices get fresh attributes on every incident pair,
  // independently per graph.
  const std::pair<Stream, MultiLayerGraph*> outlier_fills[] = {
      {kOutliers1, &out.g1}, {kOutliers2, &out.g2}};
  for (const auto& [stream, g] : outlier_fills) {
    if (params.n_outliers == 0) break;
    Rng rng(derive_seed(params.seed, stream));
    for (int a = 0; a < nl; ++a) {
      MatrixXd& e = g->edge_attrs[size_t(a)];
      for (int i = 0; i < n; ++i) {
        for (int j = std::max(i + 1, n_in); j < n; ++j) {
          const double r = rng.uniform01();
          e(0, full_edge_pos(i, j, n)) = r;
          e(0, full_edge_pos(j, i, n)) = r;
        }
      }
    }
  }

  out.g1.validate();
  out.g2.validate();
  out.ground_truth.reserve(size_t(n_in));
  for (int i = 0; i < n_in; ++i) out.ground_truth.emplace_back(i, i);
  return out;
}

MatchingProblem make_synthetic_problem(const SyntheticParams& params) {
  SyntheticPair pair = generate_synthetic_pair(params);

  KernelConfig kcfg;
  kcfg.sigma_sq = params.sigma_sq;
  kcfg.omegas = pair.omegas;
  kcfg.unary = false;
  kcfg.coupling = params.coupling;
  kcfg.normalize = true;

  MatchingProblem p;
  p.g1 = std::move(pair.g1);
  p.g2 = std::move(pair.g2);
  p.inter1 = InterEdgeSpec{};
  p.inter2 = InterEdgeSpec{};
  p.aff = build_layer_affinities(p.g1, p.g2, p.inter1, p.inter2, kcfg);
  p.ground_truth = std::move(pair.ground_truth);
  p.orig_n1 = p.g1.n_vertices;
  p.orig_n2 = p.g2.n_vertices;
  p.validate();
  return p;
}

double accuracy(const Assignment& X,
                const std::vector<std::pair<int, int>>& ground_truth) {
  if (ground_truth.empty()) {
    throw std::invalid_argument("accuracy: ground truth is empty");
  }
  if (!X.binary) {
    throw std::invalid_argument("accuracy: assignment must be binary");
  }
  int hits = 0;
  for (const auto& [i, a] : ground_truth) {
    if (i < X.matrix.rows() && a < X.matrix.cols() && X.matrix(i, a) == 1.0) {
      ++hits;
    }
  }
  return double(hits) / double(ground_truth.size());
}

}  // namespace mlfgm
