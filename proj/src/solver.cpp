#include "mlfgm/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "mlfgm/hungarian.hpp"
#include "mlfgm/padding.hpp"

namespace mlfgm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd permutation_matrix(const std::vector<int>& row_to_col, int n1, int n2) {
  MatrixXd P = MatrixXd::Zero(n1, n2);
  for (int i = 0; i < n1; ++i) {
    if (row_to_col[size_t(i)] >= 0) P(i, row_to_col[size_t(i)]) = 1.0;
  }
  return P;
}

struct LineSearchFit {
  double gamma = 0.0;
  double f0 = 0.0;   // value at X
  double f1 = 0.0;   // value at D
};

// The objective restricted to the segment X + gamma (D - X) is an exact
// quadratic in gamma, so three samples pin it down.
LineSearchFit line_search_fit(const ObjectiveContext& ctx, const MatrixXd& X,
                              const MatrixXd& D, double f0) {
  LineSearchFit out;
  out.f0 = f0;
  const MatrixXd mid = 0.5 * (X + D);
  const double fh = f_theta(mid, ctx);
  const double f1 = f_theta(D, ctx);
  out.f1 = f1;

  const double a = 2.0 * f1 + 2.0 * f0 - 4.0 * fh;
  const double b = 4.0 * fh - 3.0 * f0 - f1;
  const double scale = std::max({std::abs(f0), std::abs(fh), std::abs(f1), 1.0});

  if (std::abs(a) <= 1e-13 * scale) {
    out.gamma = (b > 0.0) ? 1.0 : 0.0;
    return out;
  }
  if (a < 0.0) {
    out.gamma = std::clamp(-b / (2.0 * a), 0.0, 1.0);
    return out;
  }
  // Convex along the segment: the maximum sits at an endpoint.
  out.gamma = (f1 >= f0) ? 1.0 : 0.0;
  return out;
}

void check_solver_config(const SolverConfig& cfg) {
  if (!(cfg.theta_step > 0.0) || cfg.theta_step > 1.0) {
    throw std::invalid_argument("solver: theta_step must lie in (0, 1]");
  }
  if (cfg.fw_max_iters < 1) {
    throw std::invalid_argument("solver: fw_max_iters must be at least 1");
  }
  if (!(cfg.fw_gap_tol >= 0.0)) {
    throw std::invalid_argument("solver: fw_gap_tol must be nonnegative");
  }
  if (!(cfg.lc_floor >= 0.0)) {
    throw std::invalid_argument("solver: lc_floor must be nonnegative");
  }
}

}  // namespace

double exact_line_search(const ObjectiveContext& ctx, const Eigen::MatrixXd& X,
                         const Eigen::MatrixXd& D) {
  return line_search_fit(ctx, X, D, f_theta(X, ctx)).gamma;
}

FwResult frank_wolfe_max(const ObjectiveContext& ctx, Eigen::MatrixXd X0,
                         const SolverConfig& cfg) {
  check_solver_config(cfg);
  FwResult res;
  res.X = std::move(X0);
  double fx = f_theta(res.X, ctx);
  res.values.push_back(fx);

  MatrixXd best_vertex;
  double best_vertex_value = -std::numeric_limits<double>::infinity();

  // The objective restricted to X + g (D - X) is an exact quadratic in g, and
  // the FW gap is its slope at g = 0, so a single endpoint evaluation pins the
  // whole segment. Picking the quadratic's maximum on [0, 1] analytically
  // saves two objective evaluations per iteration and guarantees fn >= fx.
  struct SegmentStep {
    double gamma = 0.0;
    double fn = 0.0;  // value at X + gamma (D - X)
    double f1 = 0.0;  // value at D
  };
  const auto step_along = [&ctx](const MatrixXd& X, const MatrixXd& D,
                                 double f0, double slope) {
    SegmentStep s;
    s.f1 = f_theta(D, ctx);
    const double a = s.f1 - f0 - slope;
    if (a < 0.0) {
      s.gamma = std::clamp(-slope / (2.0 * a), 0.0, 1.0);
      s.fn = f0 + s.gamma * (slope + s.gamma * a);
      return s;
    }
    // Convex along the segment: the maximum sits at an endpoint.
    s.gamma = (s.f1 >= f0) ? 1.0 : 0.0;
    s.fn = std::max(s.f1, f0);
    return s;
  };

  for (int iter = 0; iter < cfg.fw_max_iters; ++iter) {
    const MatrixXd G = grad_f_theta(res.X, ctx);
    const std::vector<int> perm = hungarian(G);
    const MatrixXd D = permutation_matrix(perm, int(G.rows()), int(G.cols()));

    res.gap = (G.cwiseProduct(D - res.X)).sum();
    if (res.gap <= cfg.fw_gap_tol * std::max(1.0, std::abs(fx))) {
      res.iters = iter;
      return res;
    }

    const SegmentStep step = step_along(res.X, D, fx, res.gap);
    double gamma = step.gamma;
    double fn = step.fn;
    MatrixXd Xn = res.X + gamma * (D - res.X);

    if (cfg.modified_fw) {
      if (step.f1 > best_vertex_value) {
        best_vertex_value = step.f1;
        best_vertex = D;
      } else if (best_vertex.size() > 0) {
        // Also try moving toward the best vertex found so far.
        const double slope_a = (G.cwiseProduct(best_vertex - res.X)).sum();
        const SegmentStep alt = step_along(res.X, best_vertex, fx, slope_a);
        if (alt.fn > fn) {
          Xn = res.X + alt.gamma * (best_vertex - res.X);
          gamma = alt.gamma;
          fn = alt.fn;
        }
      }
    }

    res.iters = iter + 1;
    if (gamma == 0.0 || fn <= fx) {
      // No ascent left along any admissible direction.
      res.iters = iter;
      return res;
    }
    res.X.swap(Xn);
    fx = fn;
    res.values.push_back(fx);
  }
  res.hit_max_iters = true;
  return res;
}

Eigen::VectorXd layer_confidence_raw(const Eigen::MatrixXd& X_binary,
                                     const FactorizedProblem& fp) {
  const int nl = fp.n_layers;
  if (fp.m1i == 0 || fp.m2i == 0) {
    return VectorXd::Constant(nl, 1.0 / double(nl));
  }
  if (X_binary.rows() != fp.n1 || X_binary.cols() != fp.n2) {
    throw std::invalid_argument("confidence: assignment shape mismatch");
  }

  const auto& e1 = fp.inc.intra1;
  const auto& e2 = fp.inc.intra2;
  // mask(e, f) = 1 iff edge e of graph 1 and edge f of graph 2 are matched at
  // both endpoints under X_binary.
  MatrixXd xs(fp.m1i, fp.m2i), xd(fp.m1i, fp.m2i);
  for (int f = 0; f < fp.m2i; ++f) {
    for (int e = 0; e < fp.m1i; ++e) {
      xs(e, f) = X_binary(e1.src[size_t(e)], e2.src[size_t(f)]);
      xd(e, f) = X_binary(e1.dst[size_t(e)], e2.dst[size_t(f)]);
    }
  }
  const MatrixXd mask_true = xs.cwiseProduct(xd);
  const double n_true = mask_true.sum();
  const double n_all = double(fp.m1i) * double(fp.m2i);
  const double n_false = n_all - n_true;

  VectorXd out(nl);
  for (int a = 0; a < nl; ++a) {
    const auto K = fp.kqi_block(a);
    const double s_true = K.cwiseProduct(mask_true).sum();
    const double s_all = K.sum();
    const double mean_true = (n_true > 0.0) ? s_true / n_true : 0.0;
    const double mean_false = (n_false > 0.0) ? (s_all - s_true) / n_false : 0.0;
    out(a) = mean_true - mean_false;
  }
  return out;
}

Eigen::VectorXd clamp_normalize_confidence(Eigen::VectorXd raw,
                                           double lc_floor) {
  const int nl = int(raw.size());
  if (nl == 0) throw std::invalid_argument("confidence: empty vector");
  if (!(lc_floor >= 0.0)) {
    throw std::invalid_argument("confidence: lc_floor must be nonnegative");
  }
  const VectorXd uniform = VectorXd::Constant(nl, 1.0 / double(nl));
  if (nl == 1) return VectorXd::Constant(1, 1.0);
  if (double(nl) * lc_floor >= 1.0) return uniform;

  VectorXd x = raw.cwiseMax(0.0);
  if (x.sum() <= 0.0) return uniform;

  // Water-filling: scale the unfloored entries so the floored set stays at
  // lc_floor and the total is exactly one.
  std::vector<bool> floored(size_t(nl), false);
  for (int pass = 0; pass < nl; ++pass) {
    double mass = 0.0;
    int n_floor = 0;
    for (int i = 0; i < nl; ++i) {
      if (floored[size_t(i)]) {
        ++n_floor;
      } else {
        mass += x(i);
      }
    }
    if (mass <= 0.0) return uniform;
    const double c = (1.0 - lc_floor * double(n_floor)) / mass;
    bool changed = false;
    for (int i = 0; i < nl; ++i) {
      if (!floored[size_t(i)] && c * x(i) < lc_floor) {
        floored[size_t(i)] = true;
        changed = true;
      }
    }
    if (!changed) {
      VectorXd out(nl);
      for (int i = 0; i < nl; ++i) {
        out(i) = floored[size_t(i)] ? lc_floor : c * x(i);
      }
      return out;
    }
  }
  return uniform;
}

Eigen::VectorXd layer_confidence(const Eigen::MatrixXd& X,
                                 const FactorizedProblem& fp, double lc_floor) {
  const std::vector<int> perm = hungarian(X);
  const MatrixXd Xb = permutation_matrix(perm, int(X.rows()), int(X.cols()));
  return clamp_normalize_confidence(layer_confidence_raw(Xb, fp), lc_floor);
}

SolveReport solve_mlfgm(const FactorizedProblem& fp, const SolverConfig& cfg) {
  check_solver_config(cfg);
  if (fp.n1 != fp.n2) {
    throw std::invalid_argument("solver: problem must be padded to square");
  }
  const auto t_start = std::chrono::steady_clock::now();

  const int n = fp.n1;
  const int nl = fp.n_layers;
  const VectorXd uniform_lc = VectorXd::Constant(nl, 1.0 / double(nl));

  SolveReport rep;
  MatrixXd X = Assignment::uniform(n, n).matrix;
  VectorXd lc = uniform_lc;
  ObjectiveContext ctx(fp, lc, 0.0);

  const int steps = std::max(1, int(std::ceil(1.0 / cfg.theta_step - 1e-9)));
  rep.trace.reserve(size_t(steps) + 1);
  rep.lc_trace.reserve(size_t(steps) + 1);

  for (int k = 0; k <= steps; ++k) {
    const double theta = std::min(double(k) * cfg.theta_step, 1.0);
    ctx.set_theta(theta);

    FwResult fw = frank_wolfe_max(ctx, X, cfg);
    X.swap(fw.X);
    rep.hit_fw_max_iters = rep.hit_fw_max_iters || fw.hit_max_iters;

    ThetaTraceEntry entry;
    entry.theta = theta;
    entry.f_theta = fw.values.back();
    entry.f_gm = f_gm(X, ctx);
    entry.fw_iters = fw.iters;
    entry.fw_gap = fw.gap;
    rep.trace.push_back(entry);
    rep.lc_trace.push_back(lc);

    if (cfg.confidence_update && nl > 1) {
      lc = layer_confidence(X, fp, cfg.lc_floor);
      ctx.set_layer_confidence(lc);
    }
  }

  rep.x_continuous = X;
  rep.layer_confidence = lc;

  bool at_vertex = true;
  for (int i = 0; i < n && at_vertex; ++i) {
    at_vertex = X.row(i).maxCoeff() >= 1.0 - 1e-6;
  }
  const std::vector<int> perm = hungarian(X);
  const MatrixXd Xb = permutation_matrix(perm, n, n);
  rep.discretized = !at_vertex;

  rep.objective = f_gm(Xb, ctx);
  if ((lc - uniform_lc).cwiseAbs().maxCoeff() > 0.0) {
    ObjectiveContext uctx(fp, uniform_lc, 0.0);
    rep.objective_uniform = f_gm(Xb, uctx);
  } else {
    rep.objective_uniform = rep.objective;
  }

  rep.assignment.matrix = Xb.topLeftCorner(fp.orig_n1, fp.orig_n2);
  rep.assignment.binary = true;
  rep.assignment.validate();

  const auto t_end = std::chrono::steady_clock::now();
  rep.wall_time_ms =
      std::chrono::duration<double, std::milli>(t_end - t_start).count();
  return rep;
}

SolveReport solve_mlfgm(const MatchingProblem& problem, const SolverConfig& cfg) {
  const MatchingProblem padded = pad_with_dummies(problem);
  const FactorizedProblem fp =
      build_factorized_problem(padded, cfg.svd_rel_tol);
  return solve_mlfgm(fp, cfg);
}

}  // namespace mlfgm
