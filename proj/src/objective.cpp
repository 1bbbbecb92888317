#include "mlfgm/objective.hpp"

namespace mlfgm {

namespace {

void check_shape(const MatrixXd& X, const FactorizedProblem& fp) {
  if (X.rows() != fp.n1 || X.cols() != fp.n2)
    detail::fail("assignment shape does not match problem");
}

// Rows of X selected by an index list, one output row per edge. Keeping the
// gathered copies column-contiguous makes the pairwise loops vectorizable.
void gather_rows(const MatrixXd& X, const std::vector<int>& rows, MatrixXd& out) {
  out.resize(ptrdiff_t(rows.size()), X.cols());
  for (int c = 0; c < X.cols(); ++c) {
    const double* xc = X.data() + ptrdiff_t(c) * X.rows();
    double* oc = out.data() + ptrdiff_t(c) * out.rows();
    for (size_t r = 0; r < rows.size(); ++r) oc[r] = xc[rows[r]];
  }
}

// sum_{e,f} Kw(e,f) * X(src1[e], src2[f]) * X(dst1[e], dst2[f])
double pairwise_sum(const MatrixXd& Kw, const EdgeIncidence& e1,
                    const EdgeIncidence& e2, const MatrixXd& X) {
  if (Kw.size() == 0) return 0.0;
  MatrixXd xs, xd;
  gather_rows(X, e1.src, xs);
  gather_rows(X, e1.dst, xd);
  double acc = 0.0;
  for (int f = 0; f < Kw.cols(); ++f)
    acc += Kw.col(f)
               .cwiseProduct(xs.col(e2.src[f]))
               .dot(xd.col(e2.dst[f]));
  return acc;
}

// grad(src1[e], src2[f]) += Kw(e,f) * X(dst1[e], dst2[f]) and the mirrored
// end-vertex update, accumulated for all edge pairs.
void pairwise_grad(const MatrixXd& Kw, const EdgeIncidence& e1,
                   const EdgeIncidence& e2, const MatrixXd& X, MatrixXd& grad) {
  if (Kw.size() == 0) return;
  MatrixXd xs, xd;
  gather_rows(X, e1.src, xs);
  gather_rows(X, e1.dst, xd);
  int m1 = int(e1.src.size());
  VectorXd t1(m1), t2(m1);
  for (int f = 0; f < Kw.cols(); ++f) {
    int a = e2.src[f], b = e2.dst[f];
    t1 = Kw.col(f).cwiseProduct(xd.col(b));
    t2 = Kw.col(f).cwiseProduct(xs.col(a));
    double* ga = grad.data() + ptrdiff_t(a) * grad.rows();
    double* gb = grad.data() + ptrdiff_t(b) * grad.rows();
    for (int e = 0; e < m1; ++e) {
      ga[e1.src[e]] += t1(e);
      gb[e1.dst[e]] += t2(e);
    }
  }
}

double unary_term(const MatrixXd& X, const ObjectiveContext& ctx) {
  if (!ctx.fp->has_unary) return 0.0;
  return ctx.Kp_w.cwiseProduct(X).sum();
}

}  // namespace

ObjectiveContext::ObjectiveContext(const FactorizedProblem& problem,
                                   VectorXd lc0, double theta0)
    : fp(&problem), theta(theta0) {
  set_layer_confidence(std::move(lc0));
}

void ObjectiveContext::set_layer_confidence(VectorXd lc_new) {
  if (lc_new.size() != fp->n_layers) detail::fail("confidence length mismatch");
  lc = std::move(lc_new);
  coupling = build_coupling(lc, fp->inc.layers);
  int nl = fp->n_layers;
  int np = int(fp->pairs.size());

  Kp_w = MatrixXd::Zero(fp->n1, fp->n2);
  if (fp->has_unary)
    for (int a = 0; a < nl; ++a) Kp_w += lc(a) * fp->kp_block(a);

  Kqi_w = MatrixXd::Zero(fp->m1i, fp->m2i);
  con_right_i = MatrixXd::Zero(fp->n2, fp->n2);
  for (int n = 0; n < nl; ++n) {
    double w = coupling.Lambda_i(n, n);
    Kqi_w += w * fp->kqi_block(n);
    con_right_i += w * fp->sumA2tA2[n];
  }
  sum_lam_i = coupling.Lambda_i.diagonal().sum();

  Kqt_w = MatrixXd::Zero(fp->m1t, fp->m2t);
  con_right_t = MatrixXd::Zero(fp->n2, fp->n2);
  for (int q = 0; q < np; ++q) {
    double w = coupling.Lambda_t(q, q);
    Kqt_w += w * fp->kqt_block(q);
    con_right_t += w * fp->sumB2tB2[q];
  }
  sum_lam_t = np > 0 ? coupling.Lambda_t.diagonal().sum() : 0.0;
}

double f_gm_dense(const MatrixXd& X, const VectorXd& lc, const MatrixXd& supra) {
  VectorXd vx = X.reshaped();
  VectorXd stacked(lc.size() * vx.size());
  for (int a = 0; a < lc.size(); ++a)
    stacked.segment(ptrdiff_t(a) * vx.size(), vx.size()) = lc(a) * vx;
  if (stacked.size() != supra.rows())
    detail::fail("supra matrix size does not match lc and X");
  return stacked.dot(supra * stacked);
}

double f_gm(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  double acc = unary_term(X, ctx);
  acc += pairwise_sum(ctx.Kqi_w, fp.inc.intra1, fp.inc.intra2, X);
  acc += pairwise_sum(ctx.Kqt_w, fp.inc.inter1, fp.inc.inter2, X);
  return acc;
}

double f_con(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  double acc = ctx.sum_lam_i * (fp.sumA1A1t * X).cwiseProduct(X).sum();
  acc += (X * ctx.con_right_i).cwiseProduct(X).sum();
  if (!fp.pairs.empty()) {
    acc += ctx.sum_lam_t * (fp.sumB1B1t * X).cwiseProduct(X).sum();
    acc += (X * ctx.con_right_t).cwiseProduct(X).sum();
  }
  return acc;
}

double f_vex(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  double acc = unary_term(X, ctx);
  MatrixXd xt = X.transpose();
  for (size_t m = 0; m < fp.A1.size(); ++m) {
    MatrixXd xta1 = xt * fp.A1[m];
    for (int n = 0; n < fp.n_layers; ++n)
      acc -= 0.5 * ctx.coupling.Lambda_i(n, n) *
             (xta1 - fp.A2[m][n] * xt).squaredNorm();
  }
  for (size_t m = 0; m < fp.B1.size(); ++m) {
    MatrixXd xtb1 = xt * fp.B1[m];
    for (size_t q = 0; q < fp.pairs.size(); ++q)
      acc -= 0.5 * ctx.coupling.Lambda_t(q, q) *
             (xtb1 - fp.B2[m][q] * xt).squaredNorm();
  }
  return acc;
}

double f_cav(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  double acc = unary_term(X, ctx);
  MatrixXd xt = X.transpose();
  for (size_t m = 0; m < fp.A1.size(); ++m) {
    MatrixXd xta1 = xt * fp.A1[m];
    for (int n = 0; n < fp.n_layers; ++n)
      acc += 0.5 * ctx.coupling.Lambda_i(n, n) *
             (xta1 + fp.A2[m][n] * xt).squaredNorm();
  }
  for (size_t m = 0; m < fp.B1.size(); ++m) {
    MatrixXd xtb1 = xt * fp.B1[m];
    for (size_t q = 0; q < fp.pairs.size(); ++q)
      acc += 0.5 * ctx.coupling.Lambda_t(q, q) *
             (xtb1 + fp.B2[m][q] * xt).squaredNorm();
  }
  return acc;
}

double f_theta(const MatrixXd& X, const ObjectiveContext& ctx) {
  double value = f_gm(X, ctx);
  double w = ctx.theta - 0.5;
  if (w != 0.0) value += w * f_con(X, ctx);
  return value;
}

MatrixXd grad_f_theta(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  MatrixXd grad = fp.has_unary ? ctx.Kp_w
                               : MatrixXd::Zero(fp.n1, fp.n2);
  pairwise_grad(ctx.Kqi_w, fp.inc.intra1, fp.inc.intra2, X, grad);
  pairwise_grad(ctx.Kqt_w, fp.inc.inter1, fp.inc.inter2, X, grad);
  double w = ctx.theta - 0.5;
  if (w != 0.0) {
    grad.noalias() += (2.0 * w * ctx.sum_lam_i) * (fp.sumA1A1t * X);
    grad.noalias() += (2.0 * w) * (X * ctx.con_right_i);
    if (!fp.pairs.empty()) {
      grad.noalias() += (2.0 * w * ctx.sum_lam_t) * (fp.sumB1B1t * X);
      grad.noalias() += (2.0 * w) * (X * ctx.con_right_t);
    }
  }
  return grad;
}

double f_gm_via_factors(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  double acc = unary_term(X, ctx);
  MatrixXd xt = X.transpose();
  for (size_t m = 0; m < fp.A1.size(); ++m) {
    MatrixXd xta1 = xt * fp.A1[m];
    for (int n = 0; n < fp.n_layers; ++n)
      acc += ctx.coupling.Lambda_i(n, n) *
             xta1.cwiseProduct(fp.A2[m][n] * xt).sum();
  }
  for (size_t m = 0; m < fp.B1.size(); ++m) {
    MatrixXd xtb1 = xt * fp.B1[m];
    for (size_t q = 0; q < fp.pairs.size(); ++q)
      acc += ctx.coupling.Lambda_t(q, q) *
             xtb1.cwiseProduct(fp.B2[m][q] * xt).sum();
  }
  return acc;
}

double f_con_via_factors(const MatrixXd& X, const ObjectiveContext& ctx) {
  const FactorizedProblem& fp = *ctx.fp;
  check_shape(X, fp);
  double acc = 0.0;
  MatrixXd xt = X.transpose();
  for (size_t m = 0; m < fp.A1.size(); ++m) {
    double left = (xt * fp.A1[m]).squaredNorm();
    for (int n = 0; n < fp.n_layers; ++n)
      acc += ctx.coupling.Lambda_i(n, n) *
             (left + (fp.A2[m][n] * xt).squaredNorm());
  }
  for (size_t m = 0; m < fp.B1.size(); ++m) {
    double left = (xt * fp.B1[m]).squaredNorm();
    for (size_t q = 0; q < fp.pairs.size(); ++q)
      acc += ctx.coupling.Lambda_t(q, q) *
             (left + (fp.B2[m][q] * xt).squaredNorm());
  }
  return acc;
}

}  // namespace mlfgm
