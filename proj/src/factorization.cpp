#include "mlfgm/factorization.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <utility>

namespace mlfgm {

PairwiseSplit split_pairwise(const MatrixXd& K, double rel_tol) {
  PairwiseSplit out;
  if (K.rows() == 0 || K.cols() == 0) {
    out.U = MatrixXd(K.rows(), 0);
    out.V = MatrixXd(K.cols(), 0);
    return out;
  }
  if (!K.allFinite()) detail::fail("pairwise split: non-finite affinity block");
  Eigen::BDCSVD<MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  double cutoff = sv.size() > 0 ? sv(0) * rel_tol : 0.0;
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff && sv(rank) > 0.0) ++rank;
  VectorXd root = sv.head(rank).cwiseSqrt();
  out.U = svd.matrixU().leftCols(rank) * root.asDiagonal();
  out.V = svd.matrixV().leftCols(rank) * root.asDiagonal();
  return out;
}

CouplingMatrices build_coupling(const VectorXd& lc, const LayerIncidence& layers) {
  if (lc.size() != layers.LGi.rows()) detail::fail("confidence length mismatch");
  CouplingMatrices c;
  MatrixXd outer = lc * lc.transpose();
  c.Lambda_i = layers.LHi.transpose() * outer * layers.LGi;
  c.Lambda_t = layers.LHt.transpose() * outer * layers.LGt;
  c.Wi = (lc.transpose() * layers.LGi).cwiseProduct(lc.transpose() * layers.LHi);
  c.Wt = (lc.transpose() * layers.LGt).cwiseProduct(lc.transpose() * layers.LHt);
  return c;
}

namespace {

// Scatter one factor column into vertex space: M(src[e], dst[e]) += w(e).
MatrixXd scatter_factor(const EdgeIncidence& inc, int n,
                        const Eigen::Ref<const VectorXd>& w) {
  MatrixXd out = MatrixXd::Zero(n, n);
  for (int e = 0; e < inc.n_edges(); ++e) out(inc.src[e], inc.dst[e]) += w(e);
  return out;
}

}  // namespace

FactorizedProblem build_factorized_problem(const MatchingProblem& p,
                                           double svd_rel_tol) {
  p.validate();
  FactorizedProblem fp;
  fp.inc = build_incidence_bundle(p);
  fp.n1 = p.g1.n_vertices;
  fp.n2 = p.g2.n_vertices;
  fp.n_layers = p.g1.n_layers;
  fp.orig_n1 = p.orig_n1 > 0 ? p.orig_n1 : fp.n1;
  fp.orig_n2 = p.orig_n2 > 0 ? p.orig_n2 : fp.n2;
  fp.m1i = fp.inc.intra1.n_edges();
  fp.m2i = fp.inc.intra2.n_edges();
  fp.m1t = fp.inc.inter1.n_edges();
  fp.m2t = fp.inc.inter2.n_edges();
  fp.pairs = fp.inc.layers.pairs;
  int nl = fp.n_layers;
  int np = int(fp.pairs.size());

  fp.Kp.resize(fp.n1, ptrdiff_t(fp.n2) * nl);
  fp.Kqi.resize(fp.m1i, ptrdiff_t(fp.m2i) * nl);
  fp.Kqt.resize(fp.m1t, ptrdiff_t(fp.m2t) * np);
  for (int a = 0; a < nl; ++a) {
    fp.Kp.middleCols(ptrdiff_t(a) * fp.n2, fp.n2) = p.aff.Kp[a];
    fp.Kqi.middleCols(ptrdiff_t(a) * fp.m2i, fp.m2i) = p.aff.Kqi[a];
  }
  for (int q = 0; q < np; ++q)
    fp.Kqt.middleCols(ptrdiff_t(q) * fp.m2t, fp.m2t) = p.aff.Kqt[q];
  fp.has_unary = fp.Kp.size() > 0 && fp.Kp.maxCoeff() > 0.0;

  fp.intra = split_pairwise(fp.Kqi, svd_rel_tol);
  fp.inter = split_pairwise(fp.Kqt, svd_rel_tol);

  int ri = fp.intra.rank();
  fp.A1.reserve(ri);
  fp.A2.resize(ri);
  for (int m = 0; m < ri; ++m) {
    fp.A1.push_back(scatter_factor(fp.inc.intra1, fp.n1, fp.intra.U.col(m)));
    fp.A2[m].reserve(nl);
    for (int n = 0; n < nl; ++n)
      fp.A2[m].push_back(scatter_factor(
          fp.inc.intra2, fp.n2,
          fp.intra.V.col(m).segment(ptrdiff_t(n) * fp.m2i, fp.m2i)));
  }
  int rt = fp.inter.rank();
  fp.B1.reserve(rt);
  fp.B2.resize(rt);
  for (int m = 0; m < rt; ++m) {
    fp.B1.push_back(scatter_factor(fp.inc.inter1, fp.n1, fp.inter.U.col(m)));
    fp.B2[m].reserve(np);
    for (int q = 0; q < np; ++q)
      fp.B2[m].push_back(scatter_factor(
          fp.inc.inter2, fp.n2,
          fp.inter.V.col(m).segment(ptrdiff_t(q) * fp.m2t, fp.m2t)));
  }

  fp.sumA1A1t = MatrixXd::Zero(fp.n1, fp.n1);
  for (const auto& a1 : fp.A1) fp.sumA1A1t += a1 * a1.transpose();
  fp.sumA2tA2.assign(nl, MatrixXd::Zero(fp.n2, fp.n2));
  for (const auto& row : fp.A2)
    for (int n = 0; n < nl; ++n)
      fp.sumA2tA2[n] += row[n].transpose() * row[n];
  fp.sumB1B1t = MatrixXd::Zero(fp.n1, fp.n1);
  for (const auto& b1 : fp.B1) fp.sumB1B1t += b1 * b1.transpose();
  fp.sumB2tB2.assign(np, MatrixXd::Zero(fp.n2, fp.n2));
  for (const auto& row : fp.B2)
    for (int q = 0; q < np; ++q)
      fp.sumB2tB2[q] += row[q].transpose() * row[q];

  fp.coupling = build_coupling(VectorXd::Constant(nl, 1.0 / nl), fp.inc.layers);
  return fp;
}

MatrixXd assemble_dense_supra(const FactorizedProblem& fp) {
  ptrdiff_t side = ptrdiff_t(fp.n_layers) * fp.n1 * fp.n2;
  if (side > 200) detail::fail("dense supra matrix limited to nl*n1*n2 <= 200");

  MatrixXd p = MatrixXd::Zero(side, side);
  VectorXd vp = fp.Kp.reshaped();
  p.diagonal() = vp;

  const auto& li = fp.inc.layers;
  MatrixXd eg_i = kroneckerProduct(fp.inc.intra2.G, fp.inc.intra1.G).eval();
  MatrixXd eh_i = kroneckerProduct(fp.inc.intra2.H, fp.inc.intra1.H).eval();
  MatrixXd kg_i = kroneckerProduct(li.LGi, eg_i).eval();
  MatrixXd kh_i = kroneckerProduct(li.LHi, eh_i).eval();
  VectorXd vqi = fp.Kqi.reshaped();
  p.noalias() += kg_i * vqi.asDiagonal() * kh_i.transpose();

  if (!fp.pairs.empty() && fp.Kqt.size() > 0) {
    MatrixXd eg_t = kroneckerProduct(fp.inc.inter2.G, fp.inc.inter1.G).eval();
    MatrixXd eh_t = kroneckerProduct(fp.inc.inter2.H, fp.inc.inter1.H).eval();
    MatrixXd kg_t = kroneckerProduct(li.LGt, eg_t).eval();
    MatrixXd kh_t = kroneckerProduct(li.LHt, eh_t).eval();
    VectorXd vqt = fp.Kqt.reshaped();
    p.noalias() += kg_t * vqt.asDiagonal() * kh_t.transpose();
  }
  return p;
}

size_t dense_supra_scalar_count(int n1, int n2, int n_layers) {
  size_t side = size_t(n_layers) * size_t(n1) * size_t(n2);
  return side * side;
}

size_t FactorizedProblem::stored_scalar_count() const {
  size_t total = 0;
  auto add = [&total](const MatrixXd& m) { total += size_t(m.size()); };
  for (const auto* e : {&inc.intra1, &inc.intra2, &inc.inter1, &inc.inter2}) {
    add(e->G);
    add(e->H);
  }
  add(inc.layers.LGi);
  add(inc.layers.LHi);
  add(inc.layers.LGt);
  add(inc.layers.LHt);
  add(Kp);
  add(Kqi);
  add(Kqt);
  add(intra.U);
  add(intra.V);
  add(inter.U);
  add(inter.V);
  for (const auto& m : A1) add(m);
  for (const auto& row : A2)
    for (const auto& m : row) add(m);
  for (const auto& m : B1) add(m);
  for (const auto& row : B2)
    for (const auto& m : row) add(m);
  add(sumA1A1t);
  add(sumB1B1t);
  for (const auto& m : sumA2tA2) add(m);
  for (const auto& m : sumB2tB2) add(m);
  add(coupling.Lambda_i);
  add(coupling.Lambda_t);
  total += size_t(coupling.Wi.size()) + size_t(coupling.Wt.size());
  return total;
}

}  // namespace mlfgm
