#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mlfgm/bench.hpp"
#include "mlfgm/objective.hpp"
#include "mlfgm/problem_io.hpp"
#include "mlfgm/solver.hpp"
#include "mlfgm/synthetic.hpp"
#include "mlfgm/verify.hpp"

using namespace mlfgm;

TEST_CASE("synthetic pairs are fully connected and seeded") {
  SyntheticParams sp;
  sp.n_inliers = 20;
  sp.n_outliers = 2;
  sp.n_attributes = 5;
  sp.deformation = 0.0;
  sp.seed = 123;
  const SyntheticPair pair = generate_synthetic_pair(sp);

  CHECK(pair.g1.n_vertices == 22);
  CHECK(pair.g2.n_vertices == 22);
  CHECK(pair.g1.n_edges() == 22 * 21);
  CHECK(pair.g1.n_layers == 5);
  REQUIRE(pair.ground_truth.size() == 20);
  for (int i = 0; i < 20; ++i) {
    CHECK(pair.ground_truth[size_t(i)].first == i);
    CHECK(pair.ground_truth[size_t(i)].second == i);
  }
  REQUIRE(pair.omegas.size() == 5);
  for (double w : pair.omegas) {
    CHECK(w >= sp.omega_min);
    CHECK(w <= sp.omega_max);
  }

  // Zero deformation copies inlier-to-inlier edge attributes exactly; both
  // graphs enumerate the same full edge list, so indices line up.
  for (int e = 0; e < pair.g1.n_edges(); ++e) {
    const auto [i, j] = pair.g1.intra_edges[size_t(e)];
    if (i >= 20 || j >= 20) continue;
    for (int a = 0; a < 5; ++a) {
      CHECK(pair.g1.edge_attrs[size_t(a)](0, e) ==
            pair.g2.edge_attrs[size_t(a)](0, e));
    }
  }

  const SyntheticPair again = generate_synthetic_pair(sp);
  for (int a = 0; a < 5; ++a) {
    CHECK((pair.g1.edge_attrs[size_t(a)] - again.g1.edge_attrs[size_t(a)])
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(pair.omegas[size_t(a)] == again.omegas[size_t(a)]);
  }

  SyntheticParams bad = sp;
  bad.n_inliers = 0;
  CHECK_THROWS_AS(generate_synthetic_pair(bad), std::invalid_argument);
  bad = sp;
  bad.omega_min = 0.0;
  CHECK_THROWS_AS(generate_synthetic_pair(bad), std::invalid_argument);
}

TEST_CASE("synthetic problems carry kernel affinities in range") {
  SyntheticParams sp;
  sp.n_inliers = 5;
  sp.n_outliers = 1;
  sp.n_attributes = 3;
  sp.deformation = 0.1;
  sp.seed = 7;
  const MatchingProblem p = make_synthetic_problem(sp);
  p.validate();
  REQUIRE(p.aff.Kqi.size() == 3);
  for (const MatrixXd& b : p.aff.Kqi) {
    CHECK(b.minCoeff() >= 0.0);
    CHECK(b.maxCoeff() <= 1.0 + 1e-12);
  }
  for (const MatrixXd& b : p.aff.Kqt) {
    CHECK((b.array() == sp.coupling).all());
  }
  for (const MatrixXd& b : p.aff.Kp) {
    CHECK(b.cwiseAbs().maxCoeff() == 0.0);  // no unary term
  }
}

TEST_CASE("accuracy counts recovered ground-truth pairs") {
  const std::vector<std::pair<int, int>> gt{{0, 0}, {1, 1}};
  CHECK(accuracy(Assignment::from_permutation({0, 1}, 2, 2), gt) == 1.0);
  CHECK(accuracy(Assignment::from_permutation({1, 0}, 2, 2), gt) == 0.0);
  CHECK(accuracy(Assignment::from_permutation({0, -1}, 2, 2), gt) == 0.5);
  CHECK_THROWS_AS(accuracy(Assignment::from_permutation({0, 1}, 2, 2), {}),
                  std::invalid_argument);
}

TEST_CASE("standard sweeps are pinned") {
  CHECK(standard_sweep("deformation") ==
        std::vector<double>{0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3});
  CHECK(standard_sweep("outlier") ==
        std::vector<double>{0.0, 2.0, 4.0, 6.0, 8.0, 10.0});
  CHECK(standard_sweep("attributes") ==
        std::vector<double>{4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0});
  CHECK_THROWS_AS(standard_sweep("bogus"), std::invalid_argument);
}

TEST_CASE("method names round-trip") {
  for (Method m : {Method::mlfgm, Method::sm_integrated, Method::sm_single_best}) {
    CHECK(parse_method(method_name(m)) == m);
  }
  CHECK(method_name(Method::mlfgm) == "mlfgm");
  CHECK(method_name(Method::sm_integrated) == "sm-integrated");
  CHECK(method_name(Method::sm_single_best) == "sm-single-best");
  CHECK_THROWS_AS(parse_method("fgm"), std::invalid_argument);
}

TEST_CASE("run_method reports uniform-confidence objectives") {
  SyntheticParams sp;
  sp.n_inliers = 5;
  sp.n_outliers = 0;
  sp.n_attributes = 3;
  sp.deformation = 0.1;
  sp.seed = 55;
  const MatchingProblem p = make_synthetic_problem(sp);
  SolverConfig solver;
  solver.theta_step = 0.1;

  const FactorizedProblem fp = build_factorized_problem(p);
  const VectorXd uniform = VectorXd::Constant(3, 1.0 / 3.0);
  const ObjectiveContext uctx(fp, uniform, 0.5);

  for (Method m : {Method::mlfgm, Method::sm_integrated, Method::sm_single_best}) {
    const MethodRun run = run_method(p, m, solver);
    run.assignment.validate();
    CHECK(run.assignment.binary);
    CHECK(run.wall_time_ms >= 0.0);
    CHECK(run.objective ==
          doctest::Approx(f_gm(run.assignment.matrix, uctx)).epsilon(1e-9));
    if (m == Method::mlfgm) {
      CHECK(run.layer_confidence.size() == 3);
    } else {
      CHECK(run.layer_confidence.size() == 0);
    }
  }
}

TEST_CASE("experiments order rows point-major and share trial seeds") {
  ExperimentConfig cfg;
  cfg.kind = "deformation";
  cfg.base.n_inliers = 4;
  cfg.base.n_attributes = 2;
  cfg.base.seed = 99;
  cfg.trials = 2;
  cfg.use_standard_fixed_params = false;
  cfg.sweep_values = {0.0, 0.1};
  cfg.solver.theta_step = 0.1;
  const BenchResult res = run_experiment(cfg);

  CHECK(res.sweep_variable == "deformation");
  CHECK(res.points == cfg.sweep_values);
  REQUIRE(res.methods.size() == 2);
  REQUIRE(res.rows.size() == 2 * 2 * 2);

  // point-major, then trial, then method
  const double sweep_want[8] = {0.0, 0.0, 0.0, 0.0, 0.1, 0.1, 0.1, 0.1};
  for (size_t r = 0; r < 8; ++r) {
    CHECK(res.rows[r].sweep_value == sweep_want[r]);
    CHECK(res.rows[r].method == res.methods[r % 2]);
  }
  CHECK(res.rows[0].seed == res.rows[1].seed);
  CHECK(res.rows[2].seed == res.rows[3].seed);
  CHECK(res.rows[0].seed != res.rows[2].seed);
  CHECK(res.rows[0].seed != res.rows[4].seed);

  REQUIRE(res.mean.size() == 2);
  REQUIRE(res.mean[0].size() == 2);
  for (size_t mi = 0; mi < 2; ++mi) {
    for (size_t pi = 0; pi < 2; ++pi) {
      CHECK(res.mean[mi][pi] >= 0.0);
      CHECK(res.mean[mi][pi] <= 1.0);
      CHECK(res.stddev[mi][pi] >= 0.0);
    }
  }

  const BenchResult rerun = run_experiment(cfg);
  CHECK(bench_csv(res) == bench_csv(rerun));

  ExperimentConfig bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = cfg;
  bad.methods.clear();
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
  bad = cfg;
  bad.kind = "unknown";
  CHECK_THROWS_AS(run_experiment(bad), std::invalid_argument);
}

TEST_CASE("csv and summary formats are stable") {
  ExperimentConfig cfg;
  cfg.kind = "outlier";
  cfg.base.n_inliers = 4;
  cfg.base.n_attributes = 2;
  cfg.base.seed = 5;
  cfg.trials = 1;
  cfg.use_standard_fixed_params = false;
  cfg.sweep_values = {0.0, 1.0, 2.0};
  cfg.solver.theta_step = 0.2;
  const BenchResult res = run_experiment(cfg);

  const std::string csv = bench_csv(res);
  REQUIRE(!csv.empty());
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < csv.size()) {
    const size_t nl = csv.find('\n', pos);
    lines.push_back(csv.substr(pos, nl - pos));
    pos = nl + 1;
  }
  REQUIRE(lines.size() == 1 + 3 * 1 * 2);
  CHECK(lines[0] == "seed,method,sweep_value,accuracy,objective");
  CHECK(lines[1].find("mlfgm") != std::string::npos);
  CHECK(lines[2].find("sm-integrated") != std::string::npos);

  const std::string timed = bench_csv(res, true);
  CHECK(timed.substr(0, timed.find('\n')) ==
        "seed,method,sweep_value,accuracy,objective,wall_time_ms");

  const nlohmann::json j = nlohmann::json::parse(bench_summary_json(res));
  CHECK(j["sweep_variable"] == "outlier");
  CHECK(j["trials"] == 1);
  CHECK(j["points"].size() == 3);
  REQUIRE(j["methods"].contains("mlfgm"));
  REQUIRE(j["methods"].contains("sm-integrated"));
  CHECK(j["methods"]["mlfgm"]["mean"].size() == 3);
  CHECK(j["methods"]["mlfgm"]["std"].size() == 3);
}

TEST_CASE("clean instances are matched perfectly across a small bench") {
  ExperimentConfig cfg;
  cfg.kind = "deformation";
  cfg.base.n_inliers = 8;
  cfg.base.n_outliers = 0;
  cfg.base.n_attributes = 3;
  cfg.base.omega_min = 0.8;
  cfg.base.seed = 11;
  cfg.trials = 3;
  cfg.use_standard_fixed_params = false;
  cfg.sweep_values = {0.0};
  cfg.solver.theta_step = 0.1;
  const BenchResult res = run_experiment(cfg);
  const size_t mlfgm_index = 0;
  REQUIRE(res.methods[mlfgm_index] == Method::mlfgm);
  CHECK(res.mean[mlfgm_index][0] == 1.0);
  CHECK(res.stddev[mlfgm_index][0] == 0.0);
}

TEST_CASE("spearman rank correlation handles ties and extremes") {
  CHECK(spearman_rho({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(spearman_rho({1, 2, 3}, {10, 20, 30}) == doctest::Approx(1.0));
  CHECK(spearman_rho({1, 1, 2}, {2, 2, 1}) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(spearman_rho({1.0}, {2.0}), std::invalid_argument);

  const std::vector<double> xs{0.0, 0.05, 0.1, 0.15, 0.2};
  const SpearmanTest dec = spearman_test_negative(xs, {5, 4, 3, 2, 1});
  CHECK(dec.rho == doctest::Approx(-1.0));
  CHECK(dec.p_value == doctest::Approx(1.0 / 120.0));

  const SpearmanTest inc = spearman_test_negative(xs, {1, 2, 3, 4, 5});
  CHECK(inc.rho == doctest::Approx(1.0));
  CHECK(inc.p_value == doctest::Approx(1.0));

  const std::vector<double> nine(9, 1.0);
  CHECK_THROWS_AS(spearman_test_negative(nine, nine), std::invalid_argument);
}

TEST_CASE("problem files round-trip exactly") {
  Rng rng(91);
  for (int t = 0; t < 3; ++t) {
    RandomProblemSpec spec;
    spec.n1 = 2 + rng.uniform_int(3);
    spec.n2 = 2 + rng.uniform_int(3);
    spec.n_layers = 1 + rng.uniform_int(3);
    spec.edge_density = t == 0 ? 0.0 : 0.7;  // include a zero-edge instance
    spec.inter_self_loops = t != 1;
    const MatchingProblem p = random_problem(rng, spec);
    const std::string text = problem_to_string(p);
    const MatchingProblem q = problem_from_string(text);
    CHECK(problem_to_string(q) == text);
    CHECK(q.g1.n_vertices == p.g1.n_vertices);
    CHECK(q.g1.intra_edges == p.g1.intra_edges);
    REQUIRE(q.aff.Kqi.size() == p.aff.Kqi.size());
    for (size_t a = 0; a < p.aff.Kqi.size(); ++a) {
      CHECK(q.aff.Kqi[a].rows() == p.aff.Kqi[a].rows());
      if (p.aff.Kqi[a].size() > 0) {
        CHECK((q.aff.Kqi[a] - p.aff.Kqi[a]).cwiseAbs().maxCoeff() == 0.0);
      }
    }
    for (size_t a = 0; a < p.aff.Kp.size(); ++a) {
      CHECK((q.aff.Kp[a] - p.aff.Kp[a]).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(q.ground_truth == p.ground_truth);
    CHECK(q.orig_n1 == p.orig_n1);
  }
}

TEST_CASE("problem files go through disk and tolerate comments") {
  SyntheticParams sp;
  sp.n_inliers = 3;
  sp.n_outliers = 1;
  sp.n_attributes = 2;
  sp.deformation = 0.2;
  sp.seed = 8;
  const MatchingProblem p = make_synthetic_problem(sp);
  const std::string path = "harness_roundtrip.mlgm.tmp";
  save_problem(path, p);
  const MatchingProblem q = load_problem(path);
  CHECK(problem_to_string(q) == problem_to_string(p));
  std::remove(path.c_str());

  const std::string text = problem_to_string(p);
  const MatchingProblem r =
      problem_from_string("# a comment\n\n" + text + "\n# trailing\n");
  CHECK(problem_to_string(r) == text);
}

TEST_CASE("malformed problem files raise parse errors with context") {
  SyntheticParams sp;
  sp.n_inliers = 3;
  sp.n_outliers = 0;
  sp.n_attributes = 2;
  sp.seed = 3;
  const std::string text = problem_to_string(make_synthetic_problem(sp));

  const std::string wrong_version = "mlgm 2" + text.substr(text.find('\n'));
  CHECK_THROWS_AS(problem_from_string(wrong_version), ParseError);

  const std::string truncated = text.substr(0, text.size() / 2);
  bool threw = false;
  try {
    problem_from_string(truncated, "broken.mlgm");
  } catch (const ParseError& e) {
    threw = true;
    CHECK(std::string(e.what()).find("broken.mlgm:") == 0);
    CHECK(e.line() > 0);
  }
  CHECK(threw);

  CHECK_THROWS_AS(load_problem("does_not_exist.mlgm"), ParseError);
}
