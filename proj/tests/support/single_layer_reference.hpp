#pragma once

// Stand-alone single-layer path-following tracer. Reimplements the whole
// pipeline for one attribute layer from the raw affinity blocks: its own SVD
// split, factor matrices, objective forms, gradient, and theta loop. Used to
// check that the multi-layer machinery collapses to the single-layer
// algorithm when only one layer exists and confidence updates are off.
// Shares only the linear assignment routine with the library, which is
// verified against enumeration separately.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "mlfgm/hungarian.hpp"
#include "mlfgm/incidence.hpp"
#include "mlfgm/solver.hpp"
#include "mlfgm/types.hpp"

namespace mlfgm_test {

struct RefTraceEntry {
  double theta = 0.0;
  double f_theta = 0.0;
  double f_gm = 0.0;
};

class SingleLayerReference {
 public:
  // Expects a padded problem with exactly one layer.
  SingleLayerReference(const mlfgm::MatchingProblem& p, double svd_rel_tol) {
    n_ = p.g1.n_vertices;
    const mlfgm::EdgeIncidence e1 =
        mlfgm::build_edge_incidence(p.g1.n_vertices, p.g1.intra_edges);
    const mlfgm::EdgeIncidence e2 =
        mlfgm::build_edge_incidence(p.g2.n_vertices, p.g2.intra_edges);
    Kp_ = p.aff.Kp.at(0);

    const Eigen::MatrixXd& Kq = p.aff.Kqi.at(0);
    if (Kq.size() > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          Kq, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Eigen::VectorXd& sv = svd.singularValues();
      const double cut = sv.size() > 0 ? svd_rel_tol * sv(0) : 0.0;
      int rank = 0;
      while (rank < sv.size() && sv(rank) > cut) ++rank;
      for (int m = 0; m < rank; ++m) {
        const double root = std::sqrt(sv(m));
        const Eigen::VectorXd u = root * svd.matrixU().col(m);
        const Eigen::VectorXd v = root * svd.matrixV().col(m);
        A1_.push_back(e1.G * u.asDiagonal() * e1.H.transpose());
        A2_.push_back(e2.G * v.asDiagonal() * e2.H.transpose());
      }
    }
    sumA1A1t_ = Eigen::MatrixXd::Zero(n_, n_);
    sumA2tA2_ = Eigen::MatrixXd::Zero(n_, n_);
    for (const Eigen::MatrixXd& a : A1_) sumA1A1t_ += a * a.transpose();
    for (const Eigen::MatrixXd& a : A2_) sumA2tA2_ += a.transpose() * a;
  }

  double f_gm(const Eigen::MatrixXd& X) const {
    double acc = Kp_.cwiseProduct(X).sum();
    for (size_t m = 0; m < A1_.size(); ++m) {
      acc += (A1_[m].transpose() * X * A2_[m]).cwiseProduct(X).sum();
    }
    return acc;
  }

  double f_con(const Eigen::MatrixXd& X) const {
    return (sumA1A1t_ * X).cwiseProduct(X).sum() +
           (X * sumA2tA2_).cwiseProduct(X).sum();
  }

  double f_theta(const Eigen::MatrixXd& X, double theta) const {
    double value = f_gm(X);
    const double w = theta - 0.5;
    if (w != 0.0) value += w * f_con(X);
    return value;
  }

  Eigen::MatrixXd grad_f_theta(const Eigen::MatrixXd& X, double theta) const {
    Eigen::MatrixXd g = Kp_;
    for (size_t m = 0; m < A1_.size(); ++m) {
      g.noalias() += A1_[m] * X * A2_[m].transpose();
      g.noalias() += A1_[m].transpose() * X * A2_[m];
    }
    const double w = theta - 0.5;
    if (w != 0.0) {
      g.noalias() += (2.0 * w) * (sumA1A1t_ * X);
      g.noalias() += (2.0 * w) * (X * sumA2tA2_);
    }
    return g;
  }

  // Mirrors the production path loop: warm-started ascent per theta step,
  // direction from linear assignment, analytic step along the segment.
  std::vector<RefTraceEntry> trace(const mlfgm::SolverConfig& cfg) const {
    Eigen::MatrixXd X =
        Eigen::MatrixXd::Constant(n_, n_, 1.0 / double(n_));
    const int steps =
        std::max(1, int(std::ceil(1.0 / cfg.theta_step - 1e-9)));
    std::vector<RefTraceEntry> out;
    out.reserve(size_t(steps) + 1);
    for (int k = 0; k <= steps; ++k) {
      const double theta = std::min(double(k) * cfg.theta_step, 1.0);
      double fx = f_theta(X, theta);
      for (int iter = 0; iter < cfg.fw_max_iters; ++iter) {
        const Eigen::MatrixXd G = grad_f_theta(X, theta);
        const std::vector<int> perm = mlfgm::hungarian(G);
        Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_, n_);
        for (int i = 0; i < n_; ++i) {
          if (perm[size_t(i)] >= 0) D(i, perm[size_t(i)]) = 1.0;
        }
        const double gap = (G.cwiseProduct(D - X)).sum();
        if (gap <= cfg.fw_gap_tol * std::max(1.0, std::abs(fx))) break;

        const double f1 = f_theta(D, theta);
        const double a = f1 - fx - gap;
        double gamma = 0.0, fn = 0.0;
        if (a < 0.0) {
          gamma = std::clamp(-gap / (2.0 * a), 0.0, 1.0);
          fn = fx + gamma * (gap + gamma * a);
        } else {
          gamma = (f1 >= fx) ? 1.0 : 0.0;
          fn = std::max(f1, fx);
        }
        if (gamma == 0.0 || fn <= fx) break;
        X += gamma * (D - X);
        fx = fn;
      }
      out.push_back({theta, fx, f_gm(X)});
    }
    return out;
  }

 private:
  int n_ = 0;
  Eigen::MatrixXd Kp_;
  std::vector<Eigen::MatrixXd> A1_, A2_;
  Eigen::MatrixXd sumA1A1t_, sumA2tA2_;
};

}  // namespace mlfgm_test
