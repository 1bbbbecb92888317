#pragma once

#include "mlfgm/types.hpp"

namespace mlfgm {

// Maximum-profit assignment. Rectangular inputs are padded internally to
// square with zero profit; rows matched to padding report -1. Column scans go
// in ascending index order with strict improvement, so tied optima resolve
// toward low column indices row by row (a constant matrix yields the
// identity).
std::vector<int> hungarian(const MatrixXd& profit);

double assignment_profit(const MatrixXd& profit, const std::vector<int>& row_to_col);

}  // namespace mlfgm
