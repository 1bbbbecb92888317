#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlfgm/rng.hpp"
#include "mlfgm/types.hpp"

namespace mlfgm {

// Unstructured random problems for oracle checks: arbitrary edge subsets and
// direct random affinity blocks rather than kernel-derived ones.
struct RandomProblemSpec {
  int n1 = 4;
  int n2 = 4;
  int n_layers = 2;
  double edge_density = 1.0;  // keep probability per directed vertex pair
  bool with_unary = true;
  bool inter_self_loops = true;
};

MatchingProblem random_problem(Rng& rng, const RandomProblemSpec& spec);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;  // failure context or brief stats
};

// Fast self-contained property suite behind the `verify` CLI subcommand.
// Every check is seeded and deterministic.
std::vector<CheckResult> run_verification(std::uint64_t seed = 0);

}  // namespace mlfgm
