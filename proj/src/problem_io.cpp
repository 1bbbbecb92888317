#include "mlfgm/problem_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace mlfgm {

namespace {

using Eigen::MatrixXd;

void write_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

void write_matrix(std::string& out, const MatrixXd& m) {
  out += "matrix ";
  out += std::to_string(m.rows());
  out += ' ';
  out += std::to_string(m.cols());
  out += '\n';
  if (m.cols() == 0) return;  // zero-width rows carry no tokens; emit no lines
  for (ptrdiff_t r = 0; r < m.rows(); ++r) {
    for (ptrdiff_t c = 0; c < m.cols(); ++c) {
      if (c) out += ' ';
      write_double(out, m(r, c));
    }
    out += '\n';
  }
}

void write_edges(std::string& out, const std::vector<std::pair<int, int>>& edges) {
  for (const auto& [i, j] : edges) {
    out += std::to_string(i);
    out += ' ';
    out += std::to_string(j);
    out += '\n';
  }
}

void write_graph(std::string& out, const MultiLayerGraph& g, int which) {
  out += "graph ";
  out += std::to_string(which);
  out += "\nvertices ";
  out += std::to_string(g.n_vertices);
  out += "\nedges ";
  out += std::to_string(g.n_edges());
  out += '\n';
  write_edges(out, g.intra_edges);
  for (int a = 0; a < g.n_layers; ++a) {
    out += "vattr ";
    out += std::to_string(a);
    out += '\n';
    write_matrix(out, g.vertex_attrs[size_t(a)]);
    out += "eattr ";
    out += std::to_string(a);
    out += '\n';
    write_matrix(out, g.edge_attrs[size_t(a)]);
  }
}

void write_inter(std::string& out, const InterEdgeSpec& spec, int which) {
  out += "inter ";
  out += std::to_string(which);
  if (spec.self_loops) {
    out += " selfloops\n";
  } else {
    out += " pairs ";
    out += std::to_string(spec.pairs.size());
    out += '\n';
    write_edges(out, spec.pairs);
  }
}

// Line-wise reader that tracks position for error messages.
class Reader {
 public:
  Reader(const std::string& text, std::string path)
      : in_(text), path_(std::move(path)) {}

  // Next meaningful line split into whitespace tokens.
  const std::vector<std::string>& next(const char* wanted_section) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      tokens_.clear();
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back(tok);
      if (tokens_.empty() || tokens_[0][0] == '#') continue;
      return tokens_;
    }
    fail(std::string("unexpected end of file; missing ") + wanted_section);
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path_, line_no_, what);
  }

  void expect(const std::vector<std::string>& toks, size_t idx,
              const std::string& word) {
    if (idx >= toks.size() || toks[idx] != word) {
      fail("expected '" + word + "'");
    }
  }

  long long to_int(const std::vector<std::string>& toks, size_t idx) {
    if (idx >= toks.size()) fail("missing integer field");
    try {
      size_t pos = 0;
      const long long v = std::stoll(toks[idx], &pos);
      if (pos != toks[idx].size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("bad integer '" + toks[idx] + "'");
    }
  }

  double to_double(const std::string& tok) {
    try {
      size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail("bad number '" + tok + "'");
    }
  }

  MatrixXd read_matrix() {
    const auto& head = next("a matrix header");
    expect(head, 0, "matrix");
    const long long rows = to_int(head, 1);
    const long long cols = to_int(head, 2);
    if (rows < 0 || cols < 0) fail("matrix dimensions must be nonnegative");
    MatrixXd m(rows, cols);
    if (cols == 0) return m;  // mirror the writer: no row lines for zero-width rows
    for (long long r = 0; r < rows; ++r) {
      const auto& row = next("a matrix row");
      if (static_cast<long long>(row.size()) != cols) {
        fail("expected " + std::to_string(cols) + " values in matrix row, got "
             + std::to_string(row.size()));
      }
      for (long long c = 0; c < cols; ++c) {
        m(r, c) = to_double(row[size_t(c)]);
      }
    }
    return m;
  }

  std::vector<std::pair<int, int>> read_pairs(long long count,
                                              const char* what) {
    std::vector<std::pair<int, int>> out;
    out.reserve(size_t(count));
    for (long long k = 0; k < count; ++k) {
      const auto& toks = next(what);
      if (toks.size() != 2) fail(std::string("expected 'i j' line for ") + what);
      out.emplace_back(int(to_int(toks, 0)), int(to_int(toks, 1)));
    }
    return out;
  }

 private:
  std::istringstream in_;
  std::string path_;
  int line_no_ = 0;
  std::vector<std::string> tokens_;
};

MultiLayerGraph read_graph(Reader& rd, int which, int nl) {
  MultiLayerGraph g;
  g.n_layers = nl;
  {
    const auto& toks = rd.next("the graph section");
    rd.expect(toks, 0, "graph");
    if (rd.to_int(toks, 1) != which) rd.fail("graph sections out of order");
  }
  {
    const auto& toks = rd.next("the vertex count");
    rd.expect(toks, 0, "vertices");
    g.n_vertices = int(rd.to_int(toks, 1));
  }
  long long m = 0;
  {
    const auto& toks = rd.next("the edge count");
    rd.expect(toks, 0, "edges");
    m = rd.to_int(toks, 1);
  }
  g.intra_edges = rd.read_pairs(m, "an intra edge");
  for (int a = 0; a < nl; ++a) {
    {
      const auto& toks = rd.next("a vertex attribute block");
      rd.expect(toks, 0, "vattr");
      if (rd.to_int(toks, 1) != a) rd.fail("vattr blocks out of order");
    }
    g.vertex_attrs.push_back(rd.read_matrix());
    {
      const auto& toks = rd.next("an edge attribute block");
      rd.expect(toks, 0, "eattr");
      if (rd.to_int(toks, 1) != a) rd.fail("eattr blocks out of order");
    }
    g.edge_attrs.push_back(rd.read_matrix());
  }
  return g;
}

InterEdgeSpec read_inter(Reader& rd, int which) {
  InterEdgeSpec spec;
  const auto& toks = rd.next("the inter-layer edge section");
  rd.expect(toks, 0, "inter");
  if (rd.to_int(toks, 1) != which) rd.fail("inter sections out of order");
  if (toks.size() < 3) rd.fail("expected 'selfloops' or 'pairs <count>'");
  if (toks[2] == "selfloops") {
    spec.self_loops = true;
  } else if (toks[2] == "pairs") {
    spec.self_loops = false;
    spec.pairs = rd.read_pairs(rd.to_int(toks, 3), "an inter edge");
  } else {
    rd.fail("expected 'selfloops' or 'pairs <count>'");
  }
  return spec;
}

}  // namespace

std::string problem_to_string(const MatchingProblem& problem) {
  problem.validate();
  std::string out;
  out += "mlgm 1\n";
  out += "layers ";
  out += std::to_string(problem.g1.n_layers);
  out += '\n';
  write_graph(out, problem.g1, 1);
  write_graph(out, problem.g2, 2);
  write_inter(out, problem.inter1, 1);
  write_inter(out, problem.inter2, 2);

  const int nl = problem.g1.n_layers;
  for (int a = 0; a < nl; ++a) {
    out += "kp ";
    out += std::to_string(a);
    out += '\n';
    write_matrix(out, problem.aff.Kp[size_t(a)]);
  }
  for (int a = 0; a < nl; ++a) {
    out += "kqi ";
    out += std::to_string(a);
    out += '\n';
    write_matrix(out, problem.aff.Kqi[size_t(a)]);
  }
  for (size_t p = 0; p < problem.aff.Kqt.size(); ++p) {
    out += "kqt ";
    out += std::to_string(p);
    out += '\n';
    write_matrix(out, problem.aff.Kqt[p]);
  }
  out += "orig ";
  out += std::to_string(problem.orig_n1);
  out += ' ';
  out += std::to_string(problem.orig_n2);
  out += '\n';
  out += "groundtruth ";
  out += std::to_string(problem.ground_truth.size());
  out += '\n';
  write_edges(out, problem.ground_truth);
  out += "end\n";
  return out;
}

MatchingProblem problem_from_string(const std::string& text,
                                    const std::string& path) {
  Reader rd(text, path);
  {
    const auto& toks = rd.next("the 'mlgm 1' header");
    if (toks.size() < 2 || toks[0] != "mlgm") rd.fail("not a mlgm problem file");
    if (toks[1] != "1") rd.fail("unsupported format version '" + toks[1] + "'");
  }
  MatchingProblem p;
  int nl = 0;
  {
    const auto& toks = rd.next("the layer count");
    rd.expect(toks, 0, "layers");
    nl = int(rd.to_int(toks, 1));
    if (nl < 1) rd.fail("layer count must be at least 1");
  }
  p.g1 = read_graph(rd, 1, nl);
  p.g2 = read_graph(rd, 2, nl);
  p.inter1 = read_inter(rd, 1);
  p.inter2 = read_inter(rd, 2);

  for (int a = 0; a < nl; ++a) {
    const auto& toks = rd.next("a kp block");
    rd.expect(toks, 0, "kp");
    if (rd.to_int(toks, 1) != a) rd.fail("kp blocks out of order");
    p.aff.Kp.push_back(rd.read_matrix());
  }
  for (int a = 0; a < nl; ++a) {
    const auto& toks = rd.next("a kqi block");
    rd.expect(toks, 0, "kqi");
    if (rd.to_int(toks, 1) != a) rd.fail("kqi blocks out of order");
    p.aff.Kqi.push_back(rd.read_matrix());
  }
  const int n_pairs = nl * (nl - 1);
  for (int q = 0; q < n_pairs; ++q) {
    const auto& toks = rd.next("a kqt block");
    rd.expect(toks, 0, "kqt");
    if (rd.to_int(toks, 1) != q) rd.fail("kqt blocks out of order");
    p.aff.Kqt.push_back(rd.read_matrix());
  }
  {
    const auto& toks = rd.next("the orig sizes");
    rd.expect(toks, 0, "orig");
    p.orig_n1 = int(rd.to_int(toks, 1));
    p.orig_n2 = int(rd.to_int(toks, 2));
  }
  {
    const auto& toks = rd.next("the ground truth section");
    rd.expect(toks, 0, "groundtruth");
    p.ground_truth = rd.read_pairs(rd.to_int(toks, 1), "a ground truth pair");
  }
  {
    const auto& toks = rd.next("the 'end' marker");
    rd.expect(toks, 0, "end");
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, std::string("file parsed but is inconsistent: ") + e.what());
  }
  return p;
}

void save_problem(const std::string& path, const MatchingProblem& problem) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const std::string text = problem_to_string(problem);
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

MatchingProblem load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return problem_from_string(ss.str(), path);
}

}  // namespace mlfgm
