#pragma once

#include "mlfgm/types.hpp"

namespace mlfgm {

// Appends attribute-less, edge-less dummy vertices to the smaller graph until
// both graphs have max(n1, n2) vertices, and zero-pads the affected affinity
// blocks. Dummy vertices carry zero affinity everywhere, so assignments that
// avoid them keep their objective value. orig_n1/orig_n2 record the
// pre-padding sizes for stripping results later.
MatchingProblem pad_with_dummies(const MatchingProblem& p);

}  // namespace mlfgm
