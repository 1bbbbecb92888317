#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlfgm/bench.hpp"
#include "mlfgm/problem_io.hpp"
#include "mlfgm/solver.hpp"
#include "mlfgm/synthetic.hpp"
#include "mlfgm/verify.hpp"

namespace {

using nlohmann::json;

int log_level() {
  static const int lvl = [] {
    const char* e = std::getenv("MLFGM_LOG");
    if (!e) return 1;
    const std::string s = e;
    if (s == "debug") return 2;
    if (s == "quiet" || s == "error") return 0;
    return 1;
  }();
  return lvl;
}

void log_info(const std::string& m) {
  if (log_level() >= 1) std::cerr << "[mlfgm] " << m << "\n";
}

void log_debug(const std::string& m) {
  if (log_level() >= 2) std::cerr << "[mlfgm] " << m << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<int> assignment_columns(const Eigen::MatrixXd& m) {
  std::vector<int> cols(size_t(m.rows()), -1);
  for (ptrdiff_t i = 0; i < m.rows(); ++i) {
    for (ptrdiff_t a = 0; a < m.cols(); ++a) {
      if (m(i, a) == 1.0) {
        cols[size_t(i)] = int(a);
        break;
      }
    }
  }
  return cols;
}

struct GenArgs {
  mlfgm::SyntheticParams params;
  std::string out;
};

int cmd_gen(const GenArgs& a) {
  const mlfgm::MatchingProblem p = mlfgm::make_synthetic_problem(a.params);
  mlfgm::save_problem(a.out, p);
  log_info("wrote " + a.out + " (" + std::to_string(p.g1.n_vertices) + "x" +
           std::to_string(p.g2.n_vertices) + " vertices, " +
           std::to_string(p.g1.n_layers) + " layers)");
  return 0;
}

struct SolveArgs {
  std::string problem_path;
  std::string method = "mlfgm";
  std::string out;
  bool timings = false;
  mlfgm::SolverConfig solver;
};

int cmd_solve(const SolveArgs& a) {
  const mlfgm::MatchingProblem problem = mlfgm::load_problem(a.problem_path);
  const mlfgm::Method method = mlfgm::parse_method(a.method);
  const mlfgm::MethodRun run = mlfgm::run_method(problem, method, a.solver);

  json j;
  j["problem"] = a.problem_path;
  j["method"] = a.method;
  j["objective"] = run.objective;
  j["objective_final_confidence"] = run.objective_final;
  j["assignment"] = assignment_columns(run.assignment.matrix);
  if (run.layer_confidence.size() > 0) {
    j["layer_confidence"] = std::vector<double>(
        run.layer_confidence.data(),
        run.layer_confidence.data() + run.layer_confidence.size());
  }
  if (!problem.ground_truth.empty()) {
    j["accuracy"] = mlfgm::accuracy(run.assignment, problem.ground_truth);
  }
  j["warning"] = run.warning;
  if (a.timings) j["wall_time_ms"] = run.wall_time_ms;

  const std::string text = j.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
    log_info("wrote " + a.out);
  }
  return run.warning ? 1 : 0;
}

struct BenchArgs {
  mlfgm::ExperimentConfig cfg;
  std::string config_path;
  std::string out = "bench.csv";
  std::string summary;
  bool timings = false;
};

void apply_config_file(const std::string& path, mlfgm::ExperimentConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") cfg.kind = value.get<std::string>();
    else if (key == "trials") cfg.trials = value.get<int>();
    else if (key == "seed") cfg.base.seed = value.get<std::uint64_t>();
    else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& name : value) {
        cfg.methods.push_back(mlfgm::parse_method(name.get<std::string>()));
      }
    } else if (key == "sweep_values") {
      cfg.sweep_values = value.get<std::vector<double>>();
    } else if (key == "use_standard_fixed_params") {
      cfg.use_standard_fixed_params = value.get<bool>();
    } else if (key == "n_inliers") cfg.base.n_inliers = value.get<int>();
    else if (key == "n_outliers") cfg.base.n_outliers = value.get<int>();
    else if (key == "n_attributes") cfg.base.n_attributes = value.get<int>();
    else if (key == "deformation") cfg.base.deformation = value.get<double>();
    else if (key == "sigma_sq") cfg.base.sigma_sq = value.get<double>();
    else if (key == "omega_min") cfg.base.omega_min = value.get<double>();
    else if (key == "omega_max") cfg.base.omega_max = value.get<double>();
    else if (key == "coupling") cfg.base.coupling = value.get<double>();
    else if (key == "theta_step") cfg.solver.theta_step = value.get<double>();
    else if (key == "fw_max_iters") cfg.solver.fw_max_iters = value.get<int>();
    else if (key == "fw_gap_tol") cfg.solver.fw_gap_tol = value.get<double>();
    else if (key == "confidence_update") {
      cfg.solver.confidence_update = value.get<bool>();
    } else if (key == "lc_floor") cfg.solver.lc_floor = value.get<double>();
    else if (key == "modified_fw") cfg.solver.modified_fw = value.get<bool>();
    else if (key == "svd_rel_tol") cfg.solver.svd_rel_tol = value.get<double>();
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

int cmd_bench(const BenchArgs& a) {
  log_info("bench kind=" + a.cfg.kind + " trials=" +
           std::to_string(a.cfg.trials));
  const mlfgm::BenchResult res = mlfgm::run_experiment(a.cfg);
  write_text(a.out, mlfgm::bench_csv(res, a.timings));
  log_info("wrote " + a.out + " (" + std::to_string(res.rows.size()) +
           " data rows)");
  if (!a.summary.empty()) {
    write_text(a.summary, mlfgm::bench_summary_json(res));
    log_info("wrote " + a.summary);
  }
  for (size_t mi = 0; mi < res.methods.size(); ++mi) {
    std::string line = mlfgm::method_name(res.methods[mi]) + " mean accuracy:";
    for (size_t pi = 0; pi < res.points.size(); ++pi) {
      line += " " + std::to_string(res.mean[mi][pi]).substr(0, 5);
    }
    log_debug(line);
  }
  return res.any_warning ? 1 : 0;
}

int cmd_verify(std::uint64_t seed) {
  const std::vector<mlfgm::CheckResult> checks = mlfgm::run_verification(seed);
  bool all_ok = true;
  for (const auto& c : checks) {
    all_ok = all_ok && c.passed;
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  std::cout << (all_ok ? "all checks passed\n" : "some checks FAILED\n");
  return all_ok ? 0 : 1;
}

void add_solver_flags(CLI::App* cmd, mlfgm::SolverConfig& s) {
  cmd->add_option("--theta-step", s.theta_step,
                  "path parameter increment in (0,1]");
  cmd->add_option("--fw-max-iters", s.fw_max_iters,
                  "iteration cap per path step");
  cmd->add_option("--fw-gap-tol", s.fw_gap_tol, "relative duality-gap stop");
  cmd->add_flag_callback(
      "--no-confidence-update",
      [&s] { s.confidence_update = false; },
      "keep layer confidence uniform along the path");
  cmd->add_option("--lc-floor", s.lc_floor, "minimum per-layer confidence");
  cmd->add_flag("--modified-fw", s.modified_fw,
                "also consider steps toward the best visited vertex");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-layer factorized graph matching solver and benchmark"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic problem file");
  gen->add_option("--out", gen_args.out, "output problem file")->required();
  gen->add_option("--inliers", gen_args.params.n_inliers, "inlier vertices");
  gen->add_option("--outliers", gen_args.params.n_outliers,
                  "outlier vertices per graph");
  gen->add_option("--attributes", gen_args.params.n_attributes,
                  "attribute layers");
  gen->add_option("--deformation", gen_args.params.deformation,
                  "attribute noise standard deviation");
  gen->add_option("--sigma-sq", gen_args.params.sigma_sq, "kernel bandwidth");
  gen->add_option("--omega-min", gen_args.params.omega_min,
                  "lower bound of the per-layer kernel weight");
  gen->add_option("--omega-max", gen_args.params.omega_max,
                  "upper bound of the per-layer kernel weight");
  gen->add_option("--coupling", gen_args.params.coupling,
                  "constant inter-layer affinity");
  gen->add_option("--seed", gen_args.params.seed, "generator seed");

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "solve a problem file");
  solve->add_option("problem", solve_args.problem_path, "problem file")
      ->required();
  solve->add_option("--method", solve_args.method,
                    "mlfgm, sm-integrated, or sm-single-best");
  solve->add_option("--out", solve_args.out,
                    "result JSON path (default: stdout)");
  solve->add_flag("--timings", solve_args.timings,
                  "include wall-clock time in the result");
  add_solver_flags(solve, solve_args.solver);

  BenchArgs bench_args;
  std::vector<std::string> bench_methods;
  CLI::App* bench = app.add_subcommand("bench", "run an experiment sweep");
  bench->add_option("--kind", bench_args.cfg.kind,
                    "deformation, outlier, or attributes");
  bench->add_option("--trials", bench_args.cfg.trials, "trials per sweep point");
  bench->add_option("--seed", bench_args.cfg.base.seed, "master seed");
  bench->add_option("--methods", bench_methods,
                    "comma-separated method list")
      ->delimiter(',');
  bench->add_option("--attributes", bench_args.cfg.base.n_attributes,
                    "attribute layers (fixed kinds only)");
  bench->add_option("--sweep", bench_args.cfg.sweep_values,
                    "explicit sweep values")
      ->delimiter(',');
  bench->add_flag_callback(
      "--no-table-defaults",
      [&bench_args] { bench_args.cfg.use_standard_fixed_params = false; },
      "do not apply the standard fixed parameters of the sweep kind");
  bench->add_option("--inliers", bench_args.cfg.base.n_inliers,
                    "inlier vertices (with --no-table-defaults)");
  bench->add_option("--outliers", bench_args.cfg.base.n_outliers,
                    "outlier vertices (fixed kinds only)");
  bench->add_option("--deformation", bench_args.cfg.base.deformation,
                    "attribute noise (fixed kinds only)");
  bench->add_option("--config", bench_args.config_path,
                    "JSON config file (flags override it)");
  bench->add_option("--out", bench_args.out, "CSV output path");
  bench->add_option("--summary", bench_args.summary, "JSON summary path");
  bench->add_flag("--timings", bench_args.timings,
                  "include wall-clock times in the CSV");
  add_solver_flags(bench, bench_args.cfg.solver);

  std::uint64_t verify_seed = 0;
  CLI::App* verify = app.add_subcommand("verify", "run the property checks");
  verify->add_option("--seed", verify_seed, "check seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_args);
    if (solve->parsed()) return cmd_solve(solve_args);
    if (bench->parsed()) {
      if (!bench_args.config_path.empty()) {
        // The file sets the base configuration; explicit flags override it.
        mlfgm::ExperimentConfig file_cfg;
        apply_config_file(bench_args.config_path, file_cfg);
        const mlfgm::ExperimentConfig& cli = bench_args.cfg;
        if (bench->count("--kind")) file_cfg.kind = cli.kind;
        if (bench->count("--trials")) file_cfg.trials = cli.trials;
        if (bench->count("--seed")) file_cfg.base.seed = cli.base.seed;
        if (bench->count("--attributes"))
          file_cfg.base.n_attributes = cli.base.n_attributes;
        if (bench->count("--sweep")) file_cfg.sweep_values = cli.sweep_values;
        if (bench->count("--no-table-defaults"))
          file_cfg.use_standard_fixed_params = false;
        if (bench->count("--inliers")) file_cfg.base.n_inliers = cli.base.n_inliers;
        if (bench->count("--outliers"))
          file_cfg.base.n_outliers = cli.base.n_outliers;
        if (bench->count("--deformation"))
          file_cfg.base.deformation = cli.base.deformation;
        if (bench->count("--theta-step"))
          file_cfg.solver.theta_step = cli.solver.theta_step;
        if (bench->count("--fw-max-iters"))
          file_cfg.solver.fw_max_iters = cli.solver.fw_max_iters;
        if (bench->count("--fw-gap-tol"))
          file_cfg.solver.fw_gap_tol = cli.solver.fw_gap_tol;
        if (bench->count("--no-confidence-update"))
          file_cfg.solver.confidence_update = false;
        if (bench->count("--lc-floor"))
          file_cfg.solver.lc_floor = cli.solver.lc_floor;
        if (bench->count("--modified-fw"))
          file_cfg.solver.modified_fw = cli.solver.modified_fw;
        bench_args.cfg = file_cfg;
      }
      if (!bench_methods.empty()) {
        bench_args.cfg.methods.clear();
        for (const auto& name : bench_methods) {
          bench_args.cfg.methods.push_back(mlfgm::parse_method(name));
        }
      }
      return cmd_bench(bench_args);
    }
    if (verify->parsed()) return cmd_verify(verify_seed);
  } catch (const mlfgm::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
