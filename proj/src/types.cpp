#include "mlfgm/types.hpp"

#include <algorithm>
#include <set>

namespace mlfgm {

void MultiLayerGraph::validate() const {
  if (n_vertices < 1) detail::fail("graph needs at least one vertex");
  if (n_layers < 1) detail::fail("graph needs at least one layer");
  std::set<std::pair<int, int>> seen;
  for (const auto& [i, j] : intra_edges) {
    if (i < 0 || i >= n_vertices || j < 0 || j >= n_vertices)
      detail::fail("edge endpoint out of range");
    if (i == j) detail::fail("intra edges may not be self loops");
    if (!seen.insert({i, j}).second) detail::fail("duplicate intra edge");
  }
  if (int(vertex_attrs.size()) != n_layers)
    detail::fail("vertex_attrs must have one block per layer");
  if (int(edge_attrs.size()) != n_layers)
    detail::fail("edge_attrs must have one block per layer");
  for (const auto& block : vertex_attrs)
    if (block.cols() != n_vertices)
      detail::fail("vertex_attrs block needs one column per vertex");
  for (const auto& block : edge_attrs) {
    if (block.cols() != int(intra_edges.size()))
      detail::fail("edge_attrs block needs one column per intra edge");
    if (!block.allFinite()) detail::fail("edge attribute is not finite");
  }
  for (const auto& block : vertex_attrs)
    if (!block.allFinite()) detail::fail("vertex attribute is not finite");
}

void Assignment::validate() const {
  constexpr double tol = 1e-9;
  if (matrix.rows() < 1 || matrix.cols() < 1)
    detail::fail("empty assignment matrix");
  if (!matrix.allFinite()) detail::fail("assignment entry is not finite");
  if (binary) {
    for (int j = 0; j < matrix.cols(); ++j)
      for (int i = 0; i < matrix.rows(); ++i) {
        double v = matrix(i, j);
        if (v != 0.0 && v != 1.0) detail::fail("binary assignment entry not in {0,1}");
      }
    for (int i = 0; i < matrix.rows(); ++i)
      if (matrix.row(i).sum() > 1.0) detail::fail("assignment row sum exceeds 1");
    for (int j = 0; j < matrix.cols(); ++j)
      if (matrix.col(j).sum() > 1.0) detail::fail("assignment column sum exceeds 1");
  } else {
    if (matrix.minCoeff() < -tol) detail::fail("assignment entry below 0");
    for (int i = 0; i < matrix.rows(); ++i)
      if (matrix.row(i).sum() > 1.0 + tol)
        detail::fail("assignment row sum exceeds 1");
    for (int j = 0; j < matrix.cols(); ++j)
      if (matrix.col(j).sum() > 1.0 + tol)
        detail::fail("assignment column sum exceeds 1");
  }
}

Assignment Assignment::uniform(int n1, int n2) {
  Assignment a;
  int n = std::max(n1, n2);
  a.matrix = MatrixXd::Constant(n1, n2, 1.0 / double(n));
  a.binary = false;
  return a;
}

Assignment Assignment::from_permutation(const std::vector<int>& row_to_col,
                                        int n1, int n2) {
  if (int(row_to_col.size()) != n1) detail::fail("permutation length mismatch");
  Assignment a;
  a.matrix = MatrixXd::Zero(n1, n2);
  a.binary = true;
  for (int i = 0; i < n1; ++i) {
    int j = row_to_col[i];
    if (j < 0) continue;
    if (j >= n2) detail::fail("permutation column out of range");
    a.matrix(i, j) = 1.0;
  }
  a.validate();
  return a;
}

std::vector<std::pair<int, int>> InterEdgeSpec::edges(int n_vertices) const {
  if (self_loops) {
    std::vector<std::pair<int, int>> out;
    out.reserve(n_vertices);
    for (int i = 0; i < n_vertices; ++i) out.push_back({i, i});
    return out;
  }
  return pairs;
}

std::vector<std::pair<int, int>> layer_pairs(int n_layers) {
  std::vector<std::pair<int, int>> out;
  out.reserve(size_t(n_layers) * (n_layers - 1));
  for (int a = 0; a < n_layers; ++a)
    for (int b = 0; b < n_layers; ++b)
      if (a != b) out.push_back({a, b});
  return out;
}

void LayerAffinities::validate(int n_layers) const {
  if (int(Kp.size()) != n_layers) detail::fail("need one Kp block per layer");
  if (int(Kqi.size()) != n_layers) detail::fail("need one Kqi block per layer");
  if (int(Kqt.size()) != n_layers * (n_layers - 1))
    detail::fail("need one Kqt block per ordered layer pair");
  auto check_uniform = [](const std::vector<MatrixXd>& blocks, const char* what) {
    for (const auto& b : blocks) {
      if (b.rows() != blocks[0].rows() || b.cols() != blocks[0].cols())
        detail::fail(std::string(what) + " blocks differ in shape");
      if (!b.allFinite()) detail::fail(std::string(what) + " entry is not finite");
      if (b.size() > 0 && b.minCoeff() < 0.0)
        detail::fail(std::string(what) + " entry is negative");
    }
  };
  check_uniform(Kp, "Kp");
  check_uniform(Kqi, "Kqi");
  if (!Kqt.empty()) check_uniform(Kqt, "Kqt");
}

void MatchingProblem::validate() const {
  g1.validate();
  g2.validate();
  if (g1.n_layers != g2.n_layers) detail::fail("graphs disagree on layer count");
  int nl = g1.n_layers;
  aff.validate(nl);
  auto expect = [](const MatrixXd& m, int r, int c, const char* what) {
    if (m.rows() != r || m.cols() != c)
      detail::fail(std::string(what) + " block shape mismatch");
  };
  expect(aff.Kp[0], g1.n_vertices, g2.n_vertices, "Kp");
  expect(aff.Kqi[0], g1.n_edges(), g2.n_edges(), "Kqi");
  if (nl > 1) {
    int m1t = int(inter1.edges(g1.n_vertices).size());
    int m2t = int(inter2.edges(g2.n_vertices).size());
    expect(aff.Kqt[0], m1t, m2t, "Kqt");
  }
  for (const auto& [i, a] : ground_truth) {
    if (i < 0 || i >= g1.n_vertices || a < 0 || a >= g2.n_vertices)
      detail::fail("ground truth pair out of range");
  }
  if (orig_n1 < 1 || orig_n1 > g1.n_vertices || orig_n2 < 1 ||
      orig_n2 > g2.n_vertices)
    detail::fail("original sizes out of range");
}

}  // namespace mlfgm
