#pragma once

#include <stdexcept>
#include <string>

#include "mlfgm/types.hpp"

namespace mlfgm {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Versioned line-oriented text format ("mlgm 1"). Values are written with 17
// significant digits so save followed by load reproduces the in-memory
// problem exactly. Blank lines and lines starting with '#' are ignored.
void save_problem(const std::string& path, const MatchingProblem& problem);
MatchingProblem load_problem(const std::string& path);

// String-based forms used by the file ones and by tests.
std::string problem_to_string(const MatchingProblem& problem);
MatchingProblem problem_from_string(const std::string& text,
                                    const std::string& path = "<string>");

}  // namespace mlfgm
