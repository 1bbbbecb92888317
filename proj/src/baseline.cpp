#include "mlfgm/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mlfgm/affinity.hpp"
#include "mlfgm/hungarian.hpp"
#include "mlfgm/objective.hpp"

namespace mlfgm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr int kBruteForceMaxN = 8;
constexpr ptrdiff_t kMaxPairs = 4096;  // K is (n1 n2)^2 dense

inline ptrdiff_t pair_index(int i, int a, int n1) {
  return ptrdiff_t(a) * n1 + i;
}

}  // namespace

void SingleLayerProblem::validate() const {
  if (n1 <= 0 || n2 <= 0) detail::fail("single-layer: empty problem");
  const ptrdiff_t np = ptrdiff_t(n1) * n2;
  if (K.rows() != np || K.cols() != np) {
    detail::fail("single-layer: K must be (n1 n2) x (n1 n2)");
  }
  if (!K.allFinite()) detail::fail("single-layer: K has non-finite entries");
  if (K.minCoeff() < 0.0) detail::fail("single-layer: K has negative entries");
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    detail::fail("single-layer: K must be symmetric");
  }
}

SingleLayerProblem build_single_layer(const Eigen::MatrixXd& Kp_int,
                                      const Eigen::MatrixXd& Kq_int,
                                      const EdgeIncidence& edges1,
                                      const EdgeIncidence& edges2) {
  SingleLayerProblem out;
  out.n1 = int(Kp_int.rows());
  out.n2 = int(Kp_int.cols());
  if (out.n1 <= 0 || out.n2 <= 0) {
    throw std::invalid_argument("build_single_layer: empty unary block");
  }
  const ptrdiff_t np = ptrdiff_t(out.n1) * out.n2;
  if (np > kMaxPairs) {
    throw std::invalid_argument(
        "build_single_layer: n1 * n2 too large for a dense pair matrix");
  }
  const int m1 = edges1.n_edges();
  const int m2 = edges2.n_edges();
  if (Kq_int.rows() != m1 || Kq_int.cols() != m2) {
    throw std::invalid_argument(
        "build_single_layer: pairwise block does not match the edge lists");
  }

  out.K = MatrixXd::Zero(np, np);
  for (int i = 0; i < out.n1; ++i) {
    for (int a = 0; a < out.n2; ++a) {
      const ptrdiff_t ia = pair_index(i, a, out.n1);
      out.K(ia, ia) = Kp_int(i, a);
    }
  }
  for (int e = 0; e < m1; ++e) {
    const int i = edges1.src[size_t(e)];
    const int j = edges1.dst[size_t(e)];
    for (int f = 0; f < m2; ++f) {
      const int a = edges2.src[size_t(f)];
      const int b = edges2.dst[size_t(f)];
      out.K(pair_index(i, a, out.n1), pair_index(j, b, out.n1)) += Kq_int(e, f);
    }
  }
  out.validate();
  return out;
}

SingleLayerProblem build_single_layer(const MatchingProblem& problem) {
  problem.validate();
  const IntegratedAffinity integ = integrate_layers(problem.aff);
  const EdgeIncidence e1 =
      build_edge_incidence(problem.g1.n_vertices, problem.g1.intra_edges);
  const EdgeIncidence e2 =
      build_edge_incidence(problem.g2.n_vertices, problem.g2.intra_edges);
  return build_single_layer(integ.Kp, integ.Kq, e1, e2);
}

Assignment spectral_match(const SingleLayerProblem& problem,
                          SpectralInfo* info) {
  problem.validate();
  const ptrdiff_t np = problem.K.rows();

  VectorXd v = VectorXd::Constant(np, 1.0 / std::sqrt(double(np)));
  bool converged = false;
  int iters = 0;
  for (; iters < 1000; ++iters) {
    VectorXd w = problem.K * v;
    const double norm = w.norm();
    if (norm == 0.0) {
      // K annihilates the iterate (e.g. all-zero affinity): keep the start.
      converged = true;
      break;
    }
    w /= norm;
    const double delta = (w - v).norm();
    v.swap(w);
    if (delta < 1e-8) {
      converged = true;
      ++iters;
      break;
    }
  }
  if (v.minCoeff() < -1e-9) {
    throw std::runtime_error("spectral_match: eigenvector left the nonnegative cone");
  }

  const MatrixXd score = v.reshaped(problem.n1, problem.n2);
  const std::vector<int> perm = hungarian(score);
  Assignment out;
  out.matrix = MatrixXd::Zero(problem.n1, problem.n2);
  for (int i = 0; i < problem.n1; ++i) {
    if (perm[size_t(i)] >= 0) out.matrix(i, perm[size_t(i)]) = 1.0;
  }
  out.binary = true;
  out.validate();
  if (info) {
    info->converged = converged;
    info->iters = iters;
    info->score = score;
  }
  return out;
}

std::pair<Assignment, double> brute_force_qap(const SingleLayerProblem& problem) {
  problem.validate();
  if (problem.n1 != problem.n2) {
    throw std::invalid_argument("brute_force_qap: problem must be square (pad first)");
  }
  const int n = problem.n1;
  if (n > kBruteForceMaxN) {
    throw std::invalid_argument("brute_force_qap: n > 8 is refused");
  }

  std::vector<int> perm(size_t(n), 0);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_value = -std::numeric_limits<double>::infinity();
  std::vector<ptrdiff_t> idx(size_t(n), 0);
  do {
    for (int i = 0; i < n; ++i) idx[size_t(i)] = pair_index(i, perm[size_t(i)], n);
    double value = 0.0;
    for (int u = 0; u < n; ++u) {
      for (int w = 0; w < n; ++w) value += problem.K(idx[size_t(u)], idx[size_t(w)]);
    }
    if (value > best_value) {
      best_value = value;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Assignment out;
  out.matrix = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) out.matrix(i, best[size_t(i)]) = 1.0;
  out.binary = true;
  return {out, best_value};
}

std::pair<Assignment, double> brute_force_qap(const FactorizedProblem& fp,
                                              const Eigen::VectorXd& lc) {
  if (fp.n1 != fp.n2) {
    throw std::invalid_argument("brute_force_qap: problem must be square (pad first)");
  }
  const int n = fp.n1;
  if (n > kBruteForceMaxN) {
    throw std::invalid_argument("brute_force_qap: n > 8 is refused");
  }
  const ObjectiveContext ctx(fp, lc, 0.0);

  std::vector<int> perm(size_t(n), 0);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_value = -std::numeric_limits<double>::infinity();
  MatrixXd X = MatrixXd::Zero(n, n);
  do {
    X.setZero();
    for (int i = 0; i < n; ++i) X(i, perm[size_t(i)]) = 1.0;
    const double value = f_gm(X, ctx);
    if (value > best_value) {
      best_value = value;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  Assignment out;
  out.matrix = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) out.matrix(i, best[size_t(i)]) = 1.0;
  out.binary = true;
  return {out, best_value};
}

std::pair<Assignment, double> brute_force_qap(const FactorizedProblem& fp) {
  const VectorXd lc =
      VectorXd::Constant(fp.n_layers, 1.0 / double(fp.n_layers));
  return brute_force_qap(fp, lc);
}

}  // namespace mlfgm
