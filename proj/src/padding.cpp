#include "mlfgm/padding.hpp"

#include <algorithm>

namespace mlfgm {

namespace {

void pad_graph(MultiLayerGraph& g, int n) {
  if (g.n_vertices >= n) return;
  for (auto& block : g.vertex_attrs) {
    MatrixXd padded = MatrixXd::Zero(block.rows(), n);
    padded.leftCols(g.n_vertices) = block;
    block = std::move(padded);
  }
  g.n_vertices = n;
}

MatrixXd pad_block(const MatrixXd& b, int rows, int cols) {
  MatrixXd out = MatrixXd::Zero(rows, cols);
  out.topLeftCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace

MatchingProblem pad_with_dummies(const MatchingProblem& p) {
  MatchingProblem out = p;
  int n1 = p.g1.n_vertices, n2 = p.g2.n_vertices;
  out.orig_n1 = p.orig_n1 > 0 ? p.orig_n1 : n1;
  out.orig_n2 = p.orig_n2 > 0 ? p.orig_n2 : n2;
  if (n1 == n2) return out;

  int n = std::max(n1, n2);
  pad_graph(out.g1, n);
  pad_graph(out.g2, n);

  for (auto& b : out.aff.Kp) b = pad_block(b, n, n);
  // Intra blocks are untouched: dummies have no intra edges. Inter blocks grow
  // only under the self-loop default, where each new vertex adds one edge with
  // zero affinity against everything.
  if (out.inter1.self_loops || out.inter2.self_loops) {
    int m1t = int(out.inter1.edges(n).size());
    int m2t = int(out.inter2.edges(n).size());
    for (auto& b : out.aff.Kqt) b = pad_block(b, m1t, m2t);
  }
  out.validate();
  return out;
}

}  // namespace mlfgm
