#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mlfgm/affinity.hpp"
#include "mlfgm/rng.hpp"
#include "mlfgm/synthetic.hpp"

using namespace mlfgm;

TEST_CASE("edge kernel hits its pinned values") {
  // Equal attributes at full weight: exponent vanishes exactly.
  CHECK(synthetic_edge_affinity(0.7, 0.7, 1.0, 0.3) == 1.0);
  // Zero weight leaves only the constant bias term.
  CHECK(synthetic_edge_affinity(0.9, 0.1, 0.0, 0.3) ==
        doctest::Approx(std::exp(-1.0 / 0.3)).epsilon(1e-12));
  CHECK(synthetic_edge_affinity(0.9, 0.1, 0.0, 0.3) ==
        doctest::Approx(0.035674).epsilon(1e-4));
  // Mixed case: ((1-0.5) + 0.5*0.3) / 0.3 = 0.65 / 0.3.
  CHECK(synthetic_edge_affinity(0.5, 0.2, 0.5, 0.3) ==
        doctest::Approx(std::exp(-0.65 / 0.3)).epsilon(1e-12));
  CHECK(synthetic_edge_affinity(0.5, 0.2, 0.5, 0.3) ==
        doctest::Approx(0.114559).epsilon(1e-4));
}

TEST_CASE("edge kernel is monotone non-increasing in the attribute gap") {
  for (double omega : {0.1, 0.5, 1.0}) {
    double prev = 2.0;
    for (double gap = 0.0; gap <= 1.0; gap += 0.05) {
      const double v = synthetic_edge_affinity(0.5, 0.5 + gap, omega, 0.3);
      CHECK(v <= prev + 1e-15);
      CHECK(v > 0.0);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
  // Equal gap magnitude on either side scores the same.
  CHECK(synthetic_edge_affinity(0.5, 0.8, 0.7, 0.3) ==
        synthetic_edge_affinity(0.5, 0.2, 0.7, 0.3));
}

TEST_CASE("edge kernel rejects a nonpositive bandwidth") {
  CHECK_THROWS_AS(synthetic_edge_affinity(0.5, 0.5, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(synthetic_edge_affinity(0.5, 0.5, 1.0, -1.0),
                  std::invalid_argument);
}

TEST_CASE("vector kernel feeds the Euclidean gap through the same formula") {
  VectorXd a(2), b(2);
  a << 0.0, 0.0;
  b << 0.3, 0.4;  // norm 0.5
  CHECK(synthetic_edge_affinity(a, b, 0.5, 0.3) ==
        doctest::Approx(synthetic_edge_affinity(0.0, 0.5, 0.5, 0.3))
            .epsilon(1e-15));
  VectorXd s1(1), s2(1);
  s1 << 0.5;
  s2 << 0.2;
  CHECK(synthetic_edge_affinity(s1, s2, 0.5, 0.3) ==
        synthetic_edge_affinity(0.5, 0.2, 0.5, 0.3));
  VectorXd wrong(3);
  wrong << 0, 0, 0;
  CHECK_THROWS_AS(synthetic_edge_affinity(a, wrong, 0.5, 0.3),
                  std::invalid_argument);
}

namespace {

MultiLayerGraph tiny_graph(int n, int nl, Rng& rng) {
  MultiLayerGraph g;
  g.n_vertices = n;
  g.n_layers = nl;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) g.intra_edges.emplace_back(i, j);
  for (int a = 0; a < nl; ++a) {
    MatrixXd va(1, n), ea(1, g.n_edges());
    for (int i = 0; i < n; ++i) va(0, i) = rng.uniform01();
    for (int e = 0; e < g.n_edges(); ++e) ea(0, e) = rng.uniform01();
    g.vertex_attrs.push_back(va);
    g.edge_attrs.push_back(ea);
  }
  g.validate();
  return g;
}

}  // namespace

TEST_CASE("identical graphs at full weight score 1 on corresponding edges") {
  Rng rng(5);
  const MultiLayerGraph g = tiny_graph(4, 2, rng);
  InterEdgeSpec inter;
  KernelConfig cfg;
  cfg.omegas = {1.0, 1.0};
  cfg.normalize = false;
  const LayerAffinities aff = build_layer_affinities(g, g, inter, inter, cfg);
  for (int a = 0; a < 2; ++a) {
    for (int m = 0; m < g.n_edges(); ++m) {
      CHECK(aff.Kqi[size_t(a)](m, m) == 1.0);
    }
    // Unary disabled by default: Kp blocks are zero.
    CHECK(aff.Kp[size_t(a)].cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("cross-layer blocks are constant at the coupling value") {
  Rng rng(6);
  const MultiLayerGraph g = tiny_graph(3, 3, rng);
  InterEdgeSpec inter;  // self loops: 3 inter edges per graph
  KernelConfig cfg;
  cfg.omegas = {0.5, 0.5, 0.5};
  cfg.coupling = 1.0;
  const LayerAffinities aff = build_layer_affinities(g, g, inter, inter, cfg);
  REQUIRE(aff.Kqt.size() == 6);  // 3*(3-1) ordered layer pairs
  for (const MatrixXd& block : aff.Kqt) {
    REQUIRE(block.rows() == 3);
    REQUIRE(block.cols() == 3);
    CHECK(block.minCoeff() == 1.0);
    CHECK(block.maxCoeff() == 1.0);
  }
}

TEST_CASE("unary blocks come from vertex attributes when enabled") {
  Rng rng(8);
  const MultiLayerGraph g1 = tiny_graph(3, 1, rng);
  const MultiLayerGraph g2 = tiny_graph(3, 1, rng);
  InterEdgeSpec inter;
  KernelConfig cfg;
  cfg.omegas = {0.6};
  cfg.unary = true;
  cfg.normalize = false;
  const LayerAffinities aff =
      build_layer_affinities(g1, g2, inter, inter, cfg);
  const double expect = synthetic_edge_affinity(
      VectorXd(g1.vertex_attrs[0].col(1)), VectorXd(g2.vertex_attrs[0].col(2)),
      0.6, cfg.sigma_sq);
  CHECK(aff.Kp[0](1, 2) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("normalized blocks peak at exactly 1") {
  Rng rng(9);
  const MultiLayerGraph g1 = tiny_graph(4, 2, rng);
  const MultiLayerGraph g2 = tiny_graph(4, 2, rng);
  InterEdgeSpec inter;
  KernelConfig cfg;
  cfg.omegas = {0.3, 0.9};
  cfg.normalize = true;
  const LayerAffinities aff =
      build_layer_affinities(g1, g2, inter, inter, cfg);
  for (const MatrixXd& b : aff.Kqi) {
    CHECK(b.maxCoeff() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(b.minCoeff() >= 0.0);
  }
}

TEST_CASE("normalize_layer divides by the maximum entry") {
  MatrixXd b(2, 2), want(2, 2);
  b << 2, 4, 0, 1;
  want << 0.5, 1, 0, 0.25;
  bool all_zero = true;
  CHECK(normalize_layer(b, &all_zero) == want);
  CHECK_FALSE(all_zero);

  const MatrixXd ones = MatrixXd::Ones(3, 2);
  CHECK(normalize_layer(ones) == ones);

  // Idempotence: renormalizing a normalized block changes nothing.
  const MatrixXd once = normalize_layer(b);
  CHECK(normalize_layer(once) == once);
}

TEST_CASE("normalize_layer passes all-zero blocks through with a flag") {
  const MatrixXd z = MatrixXd::Zero(2, 3);
  bool all_zero = false;
  CHECK(normalize_layer(z, &all_zero) == z);
  CHECK(all_zero);
}

TEST_CASE("normalize_layer rejects negative entries") {
  MatrixXd b(1, 2);
  b << 1, -0.5;
  CHECK_THROWS_AS(normalize_layer(b), std::invalid_argument);
}

TEST_CASE("layer integration sums the intra-layer blocks entrywise") {
  Rng rng(10);
  LayerAffinities aff;
  const int nl = 5;
  MatrixXd kp_sum = MatrixXd::Zero(3, 3);
  MatrixXd kq_sum = MatrixXd::Zero(4, 4);
  for (int a = 0; a < nl; ++a) {
    MatrixXd kp(3, 3), kq(4, 4);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) kp(i, j) = rng.uniform01();
    for (int j = 0; j < 4; ++j)
      for (int i = 0; i < 4; ++i) kq(i, j) = rng.uniform01();
    aff.Kp.push_back(kp);
    aff.Kqi.push_back(kq);
    kp_sum += kp;
    kq_sum += kq;
  }
  for (int q = 0; q < nl * (nl - 1); ++q)
    aff.Kqt.push_back(MatrixXd::Ones(3, 3));

  const IntegratedAffinity integ = integrate_layers(aff);
  CHECK((integ.Kp - kp_sum).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK((integ.Kq - kq_sum).cwiseAbs().maxCoeff() <= 1e-15);
  // Normalized inputs bound the integrated entries by the layer count.
  CHECK(integ.Kq.maxCoeff() <= double(nl));

  LayerAffinities one;
  one.Kp.push_back(aff.Kp[0]);
  one.Kqi.push_back(aff.Kqi[0]);
  const IntegratedAffinity single = integrate_layers(one);
  CHECK(single.Kp == aff.Kp[0]);
  CHECK(single.Kq == aff.Kqi[0]);

  LayerAffinities twice;
  twice.Kp = {aff.Kp[1], aff.Kp[1]};
  twice.Kqi = {aff.Kqi[1], aff.Kqi[1]};
  twice.Kqt = {MatrixXd::Ones(3, 3), MatrixXd::Ones(3, 3)};
  const IntegratedAffinity doubled = integrate_layers(twice);
  CHECK((doubled.Kq - 2.0 * aff.Kqi[1]).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("synthetic affinities stay within kernel range") {
  SyntheticParams sp;
  sp.n_inliers = 5;
  sp.n_outliers = 1;
  sp.n_attributes = 3;
  sp.deformation = 0.1;
  sp.seed = 99;
  const MatchingProblem p = make_synthetic_problem(sp);
  for (const MatrixXd& b : p.aff.Kqi) {
    CHECK(b.minCoeff() >= 0.0);
    CHECK(b.maxCoeff() <= 1.0 + 1e-12);
  }
}
