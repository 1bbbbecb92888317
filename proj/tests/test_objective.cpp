#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "mlfgm/factorization.hpp"
#include "mlfgm/objective.hpp"
#include "mlfgm/reference.hpp"
#include "mlfgm/verify.hpp"
#include "support/test_util.hpp"

using namespace mlfgm;
using mlfgm_test::permutation_matrix;
using mlfgm_test::random_doubly_stochastic;
using mlfgm_test::random_matrix;
using mlfgm_test::random_permutation;

namespace {

VectorXd random_confidence(Rng& rng, int nl) {
  VectorXd lc(nl);
  for (int a = 0; a < nl; ++a) lc(a) = 0.2 + rng.uniform01();
  return lc / lc.sum();
}

MatchingProblem square_problem(Rng& rng, int n, int nl, bool unary = true) {
  RandomProblemSpec spec;
  spec.n1 = n;
  spec.n2 = n;
  spec.n_layers = nl;
  spec.with_unary = unary;
  return random_problem(rng, spec);
}

}  // namespace

TEST_CASE("dense quadratic form vanishes with the assignment") {
  Rng rng(41);
  const MatchingProblem p = square_problem(rng, 3, 2);
  const FactorizedProblem fp = build_factorized_problem(p);
  const MatrixXd supra = assemble_dense_supra(fp);
  VectorXd lc(2);
  lc << 0.5, 0.5;
  CHECK(f_gm_dense(MatrixXd::Zero(3, 3), lc, supra) == 0.0);
  CHECK(f_gm_dense(random_matrix(rng, 3, 3), VectorXd::Zero(2), supra) == 0.0);
  CHECK_THROWS_AS(f_gm_dense(MatrixXd::Zero(4, 4), lc, supra),
                  std::invalid_argument);
}

TEST_CASE("factorized objective equals the dense quadratic form") {
  Rng rng(42);
  for (int t = 0; t < 10; ++t) {
    const int n = 2 + rng.uniform_int(4);
    const int nl = 1 + rng.uniform_int(3);
    const MatchingProblem p = square_problem(rng, n, nl, false);
    const FactorizedProblem fp = build_factorized_problem(p);
    const MatrixXd supra = assemble_dense_supra(fp);
    const VectorXd lc = random_confidence(rng, nl);
    const MatrixXd X = random_doubly_stochastic(rng, n);
    const ObjectiveContext ctx(fp, lc, 0.5);
    const double a = f_gm(X, ctx);
    const double b = f_gm_dense(X, lc, supra);
    CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("one-hot confidence isolates a single layer") {
  Rng rng(43);
  const MatchingProblem p = square_problem(rng, 4, 2);

  // The same instance with only layer 0 kept.
  MatchingProblem p0 = p;
  p0.g1.n_layers = 1;
  p0.g2.n_layers = 1;
  p0.g1.vertex_attrs.resize(1);
  p0.g1.edge_attrs.resize(1);
  p0.g2.vertex_attrs.resize(1);
  p0.g2.edge_attrs.resize(1);
  p0.aff.Kp.resize(1);
  p0.aff.Kqi.resize(1);
  p0.aff.Kqt.clear();
  p0.validate();

  const FactorizedProblem fp = build_factorized_problem(p);
  const FactorizedProblem fp0 = build_factorized_problem(p0);
  VectorXd onehot(2);
  onehot << 1.0, 0.0;
  const ObjectiveContext ctx(fp, onehot, 0.5);
  const ObjectiveContext ctx0(fp0, VectorXd::Ones(1), 0.5);
  for (int t = 0; t < 5; ++t) {
    const MatrixXd X = random_doubly_stochastic(rng, 4);
    CHECK(f_gm(X, ctx) == doctest::Approx(f_gm(X, ctx0)).epsilon(1e-12));
  }
}

TEST_CASE("relaxed objectives combine back to the matching score") {
  Rng rng(44);
  for (int t = 0; t < 6; ++t) {
    const int n = 3 + rng.uniform_int(3);
    const int nl = 1 + rng.uniform_int(3);
    const MatchingProblem p = square_problem(rng, n, nl);
    const FactorizedProblem fp = build_factorized_problem(p);
    ObjectiveContext ctx(fp, random_confidence(rng, nl), 0.5);
    const MatrixXd X = random_doubly_stochastic(rng, n);

    const double gm = f_gm(X, ctx);
    const double vex = f_vex(X, ctx);
    const double cav = f_cav(X, ctx);
    CHECK(std::abs(vex + cav - 2.0 * gm) <=
          1e-9 * std::max(1.0, std::abs(2.0 * gm)));
    CHECK(std::abs(f_theta(X, ctx) - gm) <=
          1e-12 * std::max(1.0, std::abs(gm)));

    ctx.set_theta(0.0);
    CHECK(std::abs(f_theta(X, ctx) - vex) <=
          1e-9 * std::max(1.0, std::abs(vex)));
    ctx.set_theta(1.0);
    CHECK(std::abs(f_theta(X, ctx) - cav) <=
          1e-9 * std::max(1.0, std::abs(cav)));
    const double th = rng.uniform01();
    ctx.set_theta(th);
    const double blend = (1.0 - th) * vex + th * cav;
    CHECK(std::abs(f_theta(X, ctx) - blend) <=
          1e-9 * std::max(1.0, std::abs(blend)));
  }
}

TEST_CASE("curvature term is constant across permutations") {
  Rng rng(45);
  const int n = 5;
  const MatchingProblem p = square_problem(rng, n, 2);
  const FactorizedProblem fp = build_factorized_problem(p);
  const ObjectiveContext ctx(fp, random_confidence(rng, 2), 0.5);

  double lo = 0.0, hi = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double c = f_con(permutation_matrix(random_permutation(rng, n)), ctx);
    lo = k ? std::min(lo, c) : c;
    hi = k ? std::max(hi, c) : c;
  }
  CHECK(hi - lo <= 1e-9 * std::max(1.0, std::abs(hi)));

  const MatrixXd X = random_doubly_stochastic(rng, n);
  CHECK(f_con(MatrixXd::Zero(n, n), ctx) == 0.0);
  CHECK(f_con(2.0 * X, ctx) ==
        doctest::Approx(4.0 * f_con(X, ctx)).epsilon(1e-12));
  CHECK(std::abs(f_con(X, ctx) - f_con_via_factors(X, ctx)) <=
        1e-9 * std::max(1.0, std::abs(f_con(X, ctx))));
  CHECK(std::abs(f_gm(X, ctx) - f_gm_via_factors(X, ctx)) <=
        1e-9 * std::max(1.0, std::abs(f_gm(X, ctx))));
}

TEST_CASE("relaxed curvatures have the advertised signs") {
  Rng rng(46);
  for (auto [n, nl] : {std::pair{4, 2}, std::pair{5, 1}, std::pair{6, 3}}) {
    const MatchingProblem p = square_problem(rng, n, nl);
    const FactorizedProblem fp = build_factorized_problem(p);
    ObjectiveContext ctx(fp, random_confidence(rng, nl), 0.0);

    // The gradient is affine in X, so Hessian columns are gradient
    // differences against the zero assignment.
    const auto hessian = [&](double theta) {
      ctx.set_theta(theta);
      const MatrixXd g0 = grad_f_theta(MatrixXd::Zero(n, n), ctx);
      MatrixXd H(n * n, n * n);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          MatrixXd E = MatrixXd::Zero(n, n);
          E(i, j) = 1.0;
          const MatrixXd col = grad_f_theta(E, ctx) - g0;
          H.col(ptrdiff_t(j) * n + i) = col.reshaped();
        }
      }
      return MatrixXd(0.5 * (H + H.transpose()));
    };

    Eigen::SelfAdjointEigenSolver<MatrixXd> vex(hessian(0.0));
    Eigen::SelfAdjointEigenSolver<MatrixXd> cav(hessian(1.0));
    CHECK(vex.eigenvalues().maxCoeff() <= 1e-8);
    CHECK(cav.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  Rng rng(47);
  for (int t = 0; t < 3; ++t) {
    const int n = 3 + rng.uniform_int(2);
    const int nl = 1 + rng.uniform_int(2);
    const MatchingProblem p = square_problem(rng, n, nl);
    const FactorizedProblem fp = build_factorized_problem(p);
    ObjectiveContext ctx(fp, random_confidence(rng, nl), rng.uniform01());
    const MatrixXd X = random_doubly_stochastic(rng, n);
    const MatrixXd g = grad_f_theta(X, ctx);
    const MatrixXd fd = finite_difference_gradient(
        [&](const MatrixXd& Y) { return f_theta(Y, ctx); }, X, 1e-5);
    const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
    CHECK((g - fd).cwiseAbs().maxCoeff() / scale < 1e-5);

    ctx.set_theta(0.5);
    const MatrixXd g_gm = grad_f_theta(X, ctx);
    const MatrixXd fd_gm = finite_difference_gradient(
        [&](const MatrixXd& Y) { return f_gm(Y, ctx); }, X, 1e-5);
    CHECK((g_gm - fd_gm).cwiseAbs().maxCoeff() /
              std::max(1.0, fd_gm.cwiseAbs().maxCoeff()) <
          1e-5);
  }
}

TEST_CASE("pairwise-free problems reduce to the weighted unary block") {
  Rng rng(48);
  RandomProblemSpec spec;
  spec.n1 = 4;
  spec.n2 = 4;
  spec.n_layers = 2;
  spec.edge_density = 0.0;
  MatchingProblem p = random_problem(rng, spec);
  REQUIRE(p.g1.n_edges() == 0);
  // Cross-layer blocks are quadratic in X too; kill them to isolate the
  // unary term.
  for (auto& b : p.aff.Kqt) b.setZero();
  const FactorizedProblem fp = build_factorized_problem(p);
  const VectorXd lc = random_confidence(rng, 2);
  const ObjectiveContext ctx(fp, lc, 0.8);

  MatrixXd want = MatrixXd::Zero(4, 4);
  for (int a = 0; a < 2; ++a) want += lc(a) * p.aff.Kp[size_t(a)];
  const MatrixXd X = random_doubly_stochastic(rng, 4);
  CHECK((grad_f_theta(X, ctx) - want).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(f_gm(X, ctx) ==
        doctest::Approx(want.cwiseProduct(X).sum()).epsilon(1e-12));
  CHECK(f_con(X, ctx) == 0.0);
}

TEST_CASE("confidence updates refresh the context in place") {
  Rng rng(49);
  const MatchingProblem p = square_problem(rng, 4, 3);
  const FactorizedProblem fp = build_factorized_problem(p);
  const VectorXd lc1 = random_confidence(rng, 3);
  const VectorXd lc2 = random_confidence(rng, 3);
  const MatrixXd X = random_doubly_stochastic(rng, 4);

  ObjectiveContext reused(fp, lc1, 0.3);
  reused.set_layer_confidence(lc2);
  const ObjectiveContext fresh(fp, lc2, 0.3);
  CHECK(f_theta(X, reused) == f_theta(X, fresh));
  CHECK((grad_f_theta(X, reused) - grad_f_theta(X, fresh))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  CHECK_THROWS_AS(reused.set_layer_confidence(VectorXd::Ones(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(f_gm(MatrixXd::Zero(3, 3), fresh), std::invalid_argument);
}

TEST_CASE("theta shifts only the curvature weight") {
  Rng rng(50);
  const MatchingProblem p = square_problem(rng, 4, 2);
  const FactorizedProblem fp = build_factorized_problem(p);
  ObjectiveContext ctx(fp, random_confidence(rng, 2), 0.5);
  const MatrixXd X = random_doubly_stochastic(rng, 4);
  const double gm = f_gm(X, ctx);
  const double con = f_con(X, ctx);
  ctx.set_theta(0.7);
  CHECK(f_theta(X, ctx) ==
        doctest::Approx(gm + 0.2 * con).epsilon(1e-12));
}
