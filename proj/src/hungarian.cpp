#include "mlfgm/hungarian.hpp"

#include <algorithm>
#include <limits>

namespace mlfgm {

// Potential-based shortest augmenting path over the cost matrix -profit,
// O(n^3). Indices are 1-based internally; column 0 is the virtual root.
std::vector<int> hungarian(const MatrixXd& profit) {
  if (profit.size() == 0) detail::fail("empty profit matrix");
  if (!profit.allFinite()) detail::fail("profit entry is not finite");
  int rows = int(profit.rows()), cols = int(profit.cols());
  int n = std::max(rows, cols);

  MatrixXd cost = MatrixXd::Zero(n, n);
  cost.topLeftCorner(rows, cols) = -profit;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      int i0 = p[j0], j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(rows, -1);
  for (int j = 1; j <= n; ++j) {
    int i = p[j];
    if (i >= 1 && i <= rows && j <= cols) row_to_col[i - 1] = j - 1;
  }
  return row_to_col;
}

double assignment_profit(const MatrixXd& profit,
                         const std::vector<int>& row_to_col) {
  double acc = 0.0;
  for (size_t i = 0; i < row_to_col.size(); ++i)
    if (row_to_col[i] >= 0) acc += profit(int(i), row_to_col[i]);
  return acc;
}

}  // namespace mlfgm
