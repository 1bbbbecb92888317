#include "mlfgm/reference.hpp"

#include <stdexcept>

namespace mlfgm {

using Eigen::MatrixXd;

MatrixXd direct_placement_supra(const FactorizedProblem& fp) {
  const int n1 = fp.n1;
  const int n2 = fp.n2;
  const int nl = fp.n_layers;
  const ptrdiff_t dim = ptrdiff_t(nl) * n1 * n2;
  if (dim > 200) {
    throw std::invalid_argument("direct_placement_supra: n_layers * n1 * n2 > 200");
  }
  const auto flat = [n1, n2](int i, int a, int layer) {
    return ptrdiff_t(layer) * n1 * n2 + ptrdiff_t(a) * n1 + i;
  };

  MatrixXd P = MatrixXd::Zero(dim, dim);

  if (fp.has_unary) {
    for (int layer = 0; layer < nl; ++layer) {
      const auto Kp = fp.kp_block(layer);
      for (int a = 0; a < n2; ++a) {
        for (int i = 0; i < n1; ++i) {
          P(flat(i, a, layer), flat(i, a, layer)) += Kp(i, a);
        }
      }
    }
  }

  const auto& e1 = fp.inc.intra1;
  const auto& e2 = fp.inc.intra2;
  for (int layer = 0; layer < nl; ++layer) {
    const auto Kq = fp.kqi_block(layer);
    for (int e = 0; e < fp.m1i; ++e) {
      for (int f = 0; f < fp.m2i; ++f) {
        P(flat(e1.src[size_t(e)], e2.src[size_t(f)], layer),
          flat(e1.dst[size_t(e)], e2.dst[size_t(f)], layer)) += Kq(e, f);
      }
    }
  }

  const auto& t1 = fp.inc.inter1;
  const auto& t2 = fp.inc.inter2;
  for (size_t p = 0; p < fp.pairs.size(); ++p) {
    const int la = fp.pairs[p].first;
    const int lb = fp.pairs[p].second;
    const auto Kq = fp.kqt_block(int(p));
    for (int e = 0; e < fp.m1t; ++e) {
      for (int f = 0; f < fp.m2t; ++f) {
        P(flat(t1.src[size_t(e)], t2.src[size_t(f)], la),
          flat(t1.dst[size_t(e)], t2.dst[size_t(f)], lb)) += Kq(e, f);
      }
    }
  }
  return P;
}

MatrixXd finite_difference_gradient(
    const std::function<double(const Eigen::MatrixXd&)>& f,
    const Eigen::MatrixXd& X, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("finite_difference_gradient: h must be positive");
  }
  MatrixXd grad(X.rows(), X.cols());
  MatrixXd Xp = X;
  for (ptrdiff_t c = 0; c < X.cols(); ++c) {
    for (ptrdiff_t r = 0; r < X.rows(); ++r) {
      const double orig = Xp(r, c);
      Xp(r, c) = orig + h;
      const double fp_val = f(Xp);
      Xp(r, c) = orig - h;
      const double fm_val = f(Xp);
      Xp(r, c) = orig;
      grad(r, c) = (fp_val - fm_val) / (2.0 * h);
    }
  }
  return grad;
}

}  // namespace mlfgm
