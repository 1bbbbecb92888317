#include "mlfgm/verify.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "mlfgm/baseline.hpp"
#include "mlfgm/bench.hpp"
#include "mlfgm/hungarian.hpp"
#include "mlfgm/objective.hpp"
#include "mlfgm/padding.hpp"
#include "mlfgm/problem_io.hpp"
#include "mlfgm/reference.hpp"
#include "mlfgm/solver.hpp"
#include "mlfgm/synthetic.hpp"

namespace mlfgm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd random_matrix(Rng& rng, ptrdiff_t rows, ptrdiff_t cols) {
  MatrixXd m(rows, cols);
  for (ptrdiff_t c = 0; c < cols; ++c) {
    for (ptrdiff_t r = 0; r < rows; ++r) m(r, c) = rng.uniform01();
  }
  return m;
}

MatrixXd random_doubly_stochastic(Rng& rng, int n) {
  // Sinkhorn scaling of a positive random matrix.
  MatrixXd X = random_matrix(rng, n, n).array() + 0.1;
  for (int it = 0; it < 200; ++it) {
    for (int i = 0; i < n; ++i) X.row(i) /= X.row(i).sum();
    for (int j = 0; j < n; ++j) X.col(j) /= X.col(j).sum();
  }
  return X;
}

VectorXd random_confidence(Rng& rng, int nl) {
  VectorXd lc(nl);
  for (int a = 0; a < nl; ++a) lc(a) = 0.05 + 0.95 * rng.uniform01();
  lc /= lc.sum();
  return lc;
}

std::vector<int> random_permutation(Rng& rng, int n) {
  std::vector<int> p(size_t(n), 0);
  for (int i = 0; i < n; ++i) p[size_t(i)] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = int(rng.uniform_int(std::uint64_t(i + 1)));
    std::swap(p[size_t(i)], p[size_t(j)]);
  }
  return p;
}

MatrixXd permutation_matrix(const std::vector<int>& p) {
  const int n = int(p.size());
  MatrixXd X = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) X(i, p[size_t(i)]) = 1.0;
  return X;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(3);
  ss << v;
  return ss.str();
}

using CheckFn = std::function<std::string(Rng&)>;  // empty string = pass

CheckResult run_check(const std::string& name, std::uint64_t seed, int index,
                      const CheckFn& fn) {
  CheckResult res;
  res.name = name;
  Rng rng(derive_seed(seed, 77, std::uint64_t(index)));
  try {
    res.detail = fn(rng);
    res.passed = res.detail.empty() || res.detail.rfind("ok:", 0) == 0;
  } catch (const std::exception& e) {
    res.passed = false;
    res.detail = std::string("exception: ") + e.what();
  }
  return res;
}

}  // namespace

MatchingProblem random_problem(Rng& rng, const RandomProblemSpec& spec) {
  MatchingProblem p;
  const int nl = spec.n_layers;
  const int sizes[2] = {spec.n1, spec.n2};
  MultiLayerGraph* graphs[2] = {&p.g1, &p.g2};
  for (int g = 0; g < 2; ++g) {
    MultiLayerGraph& mg = *graphs[g];
    mg.n_vertices = sizes[g];
    mg.n_layers = nl;
    for (int i = 0; i < sizes[g]; ++i) {
      for (int j = 0; j < sizes[g]; ++j) {
        if (i != j && rng.uniform01() < spec.edge_density) {
          mg.intra_edges.emplace_back(i, j);
        }
      }
    }
    for (int a = 0; a < nl; ++a) {
      mg.vertex_attrs.push_back(random_matrix(rng, 2, mg.n_vertices));
      mg.edge_attrs.push_back(random_matrix(rng, 1, mg.n_edges()));
    }
  }
  p.inter1.self_loops = spec.inter_self_loops;
  p.inter2.self_loops = spec.inter_self_loops;
  if (!spec.inter_self_loops) {
    // Random sparse inter-layer support on each graph's vertex set.
    for (int g = 0; g < 2; ++g) {
      auto& spec_g = g == 0 ? p.inter1 : p.inter2;
      for (int i = 0; i < sizes[g]; ++i) {
        for (int j = 0; j < sizes[g]; ++j) {
          if (rng.uniform01() < 0.5) spec_g.pairs.emplace_back(i, j);
        }
      }
      if (spec_g.pairs.empty()) spec_g.pairs.emplace_back(0, 0);
    }
  }
  const int m1i = p.g1.n_edges();
  const int m2i = p.g2.n_edges();
  const int m1t = int(p.inter1.edges(p.g1.n_vertices).size());
  const int m2t = int(p.inter2.edges(p.g2.n_vertices).size());
  for (int a = 0; a < nl; ++a) {
    p.aff.Kp.push_back(spec.with_unary
                           ? random_matrix(rng, spec.n1, spec.n2)
                           : MatrixXd::Zero(spec.n1, spec.n2));
    p.aff.Kqi.push_back(random_matrix(rng, m1i, m2i));
  }
  const int n_pairs = nl * (nl - 1);
  for (int q = 0; q < n_pairs; ++q) {
    p.aff.Kqt.push_back(random_matrix(rng, m1t, m2t));
  }
  p.orig_n1 = spec.n1;
  p.orig_n2 = spec.n2;
  p.validate();
  return p;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
  std::vector<CheckResult> out;
  int idx = 0;
  const auto check = [&](const std::string& name, const CheckFn& fn) {
    out.push_back(run_check(name, seed, idx++, fn));
  };

  check("dense-assembly-equivalence", [](Rng& rng) -> std::string {
    double worst = 0.0;
    for (int t = 0; t < 6; ++t) {
      RandomProblemSpec spec;
      spec.n1 = 2 + int(rng.uniform_int(4));
      spec.n2 = 2 + int(rng.uniform_int(4));
      spec.n_layers = 1 + int(rng.uniform_int(3));
      spec.edge_density = t % 2 ? 0.6 : 1.0;
      spec.inter_self_loops = t % 3 != 0;
      const MatchingProblem p = random_problem(rng, spec);
      const FactorizedProblem fp = build_factorized_problem(p, 1e-10);
      const MatrixXd dense = assemble_dense_supra(fp);
      const MatrixXd direct = direct_placement_supra(fp);
      worst = std::max(worst, (dense - direct).cwiseAbs().maxCoeff());
    }
    if (worst > 1e-10) return "max abs deviation " + fmt(worst) + " > 1e-10";
    return "ok: max abs deviation " + fmt(worst);
  });

  check("factorized-objective-equivalence", [](Rng& rng) -> std::string {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      RandomProblemSpec spec;
      spec.n1 = 2 + int(rng.uniform_int(4));
      spec.n2 = spec.n1;
      spec.n_layers = 1 + int(rng.uniform_int(3));
      spec.with_unary = false;
      const MatchingProblem p = random_problem(rng, spec);
      const FactorizedProblem fp = build_factorized_problem(p, 1e-10);
      const MatrixXd P = assemble_dense_supra(fp);
      const VectorXd lc = random_confidence(rng, spec.n_layers);
      const MatrixXd X = random_doubly_stochastic(rng, spec.n1);
      const ObjectiveContext ctx(fp, lc, 0.0);
      const double a = f_gm(X, ctx);
      const double b = f_gm_dense(X, lc, P);
      worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
    }
    if (worst > 1e-8) return "max rel deviation " + fmt(worst) + " > 1e-8";
    return "ok: max rel deviation " + fmt(worst);
  });

  check("relaxation-identities", [](Rng& rng) -> std::string {
    for (int t = 0; t < 8; ++t) {
      RandomProblemSpec spec;
      spec.n1 = 3 + int(rng.uniform_int(3));
      spec.n2 = spec.n1;
      spec.n_layers = 1 + int(rng.uniform_int(3));
      const MatchingProblem p = random_problem(rng, spec);
      const FactorizedProblem fp = build_factorized_problem(p, 1e-10);
      ObjectiveContext ctx(fp, random_confidence(rng, spec.n_layers), 0.5);
      const MatrixXd X = random_doubly_stochastic(rng, spec.n1);
      const double gm = f_gm(X, ctx);
      const double sum = f_vex(X, ctx) + f_cav(X, ctx);
      if (std::abs(sum - 2.0 * gm) > 1e-9 * std::max(1.0, std::abs(2.0 * gm))) {
        return "f_vex + f_cav != 2 f_gm (" + fmt(sum) + " vs " + fmt(2 * gm) + ")";
      }
      if (std::abs(f_theta(X, ctx) - gm) > 1e-12 * std::max(1.0, std::abs(gm))) {
        return "f_theta(0.5) != f_gm";
      }
      double lo = 0.0, hi = 0.0;
      for (int k = 0; k < 10; ++k) {
        const double c =
            f_con(permutation_matrix(random_permutation(rng, spec.n1)), ctx);
        lo = k ? std::min(lo, c) : c;
        hi = k ? std::max(hi, c) : c;
      }
      if (hi - lo > 1e-9 * std::max(1.0, std::abs(hi))) {
        return "f_con varies across permutations by " + fmt(hi - lo);
      }
    }
    return "";
  });

  check("factor-evaluators-agree", [](Rng& rng) -> std::string {
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      RandomProblemSpec spec;
      spec.n1 = 3 + int(rng.uniform_int(3));
      spec.n2 = spec.n1;
      spec.n_layers = 1 + int(rng.uniform_int(3));
      spec.with_unary = false;
      const MatchingProblem p = random_problem(rng, spec);
      const FactorizedProblem fp = build_factorized_problem(p, 1e-10);
      const ObjectiveContext ctx(fp, random_confidence(rng, spec.n_layers), 0.3);
      const MatrixXd X = random_doubly_stochastic(rng, spec.n1);
      const double g1v = f_gm(X, ctx), g2v = f_gm_via_factors(X, ctx);
      const double c1 = f_con(X, ctx), c2 = f_con_via_factors(X, ctx);
      worst = std::max(worst,
                       std::abs(g1v - g2v) / std::max(1.0, std::abs(g2v)));
      worst = std::max(worst, std::abs(c1 - c2) / std::max(1.0, std::abs(c2)));
    }
    if (worst > 1e-9) return "max rel deviation " + fmt(worst) + " > 1e-9";
    return "ok: max rel deviation " + fmt(worst);
  });

  check("gradient-matches-finite-difference", [](Rng& rng) -> std::string {
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
      RandomProblemSpec spec;
      spec.n1 = 3 + int(rng.uniform_int(2));
      spec.n2 = spec.n1;
      spec.n_layers = 1 + int(rng.uniform_int(2));
      const MatchingProblem p = random_problem(rng, spec);
      const FactorizedProblem fp = build_factorized_problem(p, 1e-10);
      ObjectiveContext ctx(fp, random_confidence(rng, spec.n_layers),
                           rng.uniform01());
      const MatrixXd X = random_doubly_stochastic(rng, spec.n1);
      const MatrixXd g = grad_f_theta(X, ctx);
      const MatrixXd fd = finite_difference_gradient(
          [&](const MatrixXd& Y) { return f_theta(Y, ctx); }, X, 1e-5);
      const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
      worst = std::max(worst, (g - fd).cwiseAbs().maxCoeff() / scale);
    }
    if (worst > 1e-5) return "max rel deviation " + fmt(worst) + " > 1e-5";
    return "ok: max rel deviation " + fmt(worst);
  });

  check("svd-split-reconstruction", [](Rng& rng) -> std::string {
    double worst = 0.0;
    for (int t = 0; t < 6; ++t) {
      const int rows = 2 + int(rng.uniform_int(8));
      const int cols = 2 + int(rng.uniform_int(12));
      MatrixXd K = random_matrix(rng, rows, cols);
      if (t == 0) K.setZero();
      const PairwiseSplit s = split_pairwise(K, 1e-10);
      const double num = (K - s.U * s.V.transpose()).norm();
      const double den = std::max(K.norm(), 1e-300);
      worst = std::max(worst, K.norm() == 0.0 ? num : num / den);
    }
    if (worst > 1e-9) return "max rel residual " + fmt(worst) + " > 1e-9";
    return "ok: max rel residual " + fmt(worst);
  });

  check("hungarian-matches-brute-force", [](Rng& rng) -> std::string {
    for (int t = 0; t < 25; ++t) {
      const int n1 = 2 + int(rng.uniform_int(4));
      const int n2 = 2 + int(rng.uniform_int(4));
      MatrixXd profit = random_matrix(rng, n1, n2);
      profit.array() -= 0.5;
      const std::vector<int> got = hungarian(profit);
      const double got_value = assignment_profit(profit, got);
      // Enumerate all injections of rows into columns.
      const int n = std::max(n1, n2);
      std::vector<int> cols(size_t(n), 0);
      for (int i = 0; i < n; ++i) cols[size_t(i)] = i;
      double best = -1e300;
      std::sort(cols.begin(), cols.end());
      do {
        double v = 0.0;
        for (int i = 0; i < n1; ++i) {
          if (cols[size_t(i)] < n2) v += profit(i, cols[size_t(i)]);
        }
        best = std::max(best, v);
      } while (std::next_permutation(cols.begin(), cols.end()));
      if (std::abs(got_value - best) > 1e-9) {
        return "value " + fmt(got_value) + " vs brute force " + fmt(best);
      }
    }
    return "";
  });

  check("confidence-constant-layer-is-uninformative", [](Rng& rng) -> std::string {
    RandomProblemSpec spec;
    spec.n1 = 5;
    spec.n2 = 5;
    spec.n_layers = 3;
    MatchingProblem p = random_problem(rng, spec);
    p.aff.Kqi[1].setConstant(0.37);  // layer 1 carries no signal
    const FactorizedProblem fp = build_factorized_problem(p, 1e-10);
    const MatrixXd X = permutation_matrix(random_permutation(rng, 5));
    const VectorXd raw = layer_confidence_raw(X, fp);
    if (std::abs(raw(1)) > 1e-12) {
      return "constant layer raw confidence " + fmt(raw(1)) + " != 0";
    }
    const VectorXd lc = clamp_normalize_confidence(raw, 1e-3);
    if (std::abs(lc.sum() - 1.0) > 1e-9) return "confidence does not sum to 1";
    if (lc.minCoeff() < 1e-3 - 1e-15) return "confidence below floor";
    return "";
  });

  check("problem-file-roundtrip", [](Rng& rng) -> std::string {
    for (int t = 0; t < 3; ++t) {
      RandomProblemSpec spec;
      spec.n1 = 2 + int(rng.uniform_int(4));
      spec.n2 = 2 + int(rng.uniform_int(4));
      spec.n_layers = 1 + int(rng.uniform_int(3));
      spec.edge_density = 0.7;
      spec.inter_self_loops = t != 1;
      const MatchingProblem p = random_problem(rng, spec);
      const std::string text = problem_to_string(p);
      const MatchingProblem q = problem_from_string(text);
      if (problem_to_string(q) != text) return "serialized forms differ";
    }
    return "";
  });

  check("solver-recovers-self-matching", [](Rng&) -> std::string {
    SyntheticParams sp;
    sp.n_inliers = 6;
    sp.n_outliers = 0;
    sp.n_attributes = 2;
    sp.deformation = 0.0;
    // High omega makes the kernel drop sharply away from equal attributes,
    // so the identity matching is the unique optimum by a wide margin.
    sp.omega_min = 0.8;
    sp.seed = 12345;
    const MatchingProblem p = make_synthetic_problem(sp);
    SolverConfig cfg;
    const SolveReport rep = solve_mlfgm(p, cfg);
    const double acc = accuracy(rep.assignment, p.ground_truth);
    if (acc < 1.0) return "self-matching accuracy " + fmt(acc) + " < 1";
    return "";
  });

  check("reported-objective-matches-dense", [](Rng&) -> std::string {
    SyntheticParams sp;
    sp.n_inliers = 4;
    sp.n_outliers = 1;
    sp.n_attributes = 2;
    sp.deformation = 0.1;
    sp.seed = 777;
    const MatchingProblem p = make_synthetic_problem(sp);
    const MatchingProblem padded = pad_with_dummies(p);
    const FactorizedProblem fp = build_factorized_problem(padded, 1e-10);
    SolverConfig cfg;
    const SolveReport rep = solve_mlfgm(fp, cfg);
    MatrixXd X = MatrixXd::Zero(fp.n1, fp.n2);
    X.topLeftCorner(rep.assignment.matrix.rows(), rep.assignment.matrix.cols()) =
        rep.assignment.matrix;
    const MatrixXd P = assemble_dense_supra(fp);
    const double dense = f_gm_dense(X, rep.layer_confidence, P);
    const double rel =
        std::abs(dense - rep.objective) / std::max(1.0, std::abs(dense));
    if (rel > 1e-8) return "objective off by rel " + fmt(rel);
    return "";
  });

  check("csv-bytes-deterministic", [](Rng&) -> std::string {
    ExperimentConfig cfg;
    cfg.kind = "deformation";
    cfg.base.n_inliers = 4;
    cfg.base.n_attributes = 2;
    cfg.base.seed = 99;
    cfg.trials = 2;
    cfg.methods = {Method::mlfgm, Method::sm_integrated};
    cfg.use_standard_fixed_params = false;
    cfg.sweep_values = {0.0, 0.1};
    cfg.solver.theta_step = 0.1;
    const std::string a = bench_csv(run_experiment(cfg));
    const std::string b = bench_csv(run_experiment(cfg));
    if (a != b) return "two identical runs produced different CSV bytes";
    const size_t rows = size_t(std::count(a.begin(), a.end(), '\n'));
    if (rows != 1 + 2 * 2 * 2) return "unexpected CSV row count";
    return "";
  });

  return out;
}

}  // namespace mlfgm
