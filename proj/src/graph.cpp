#include "critperc/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "critperc/error.hpp"
#include "critperc/io.hpp"

namespace critperc {

RegularGraph::RegularGraph(int n, int d, std::span<const Edge> edges) : n_(n), d_(d) {
  if (n < 1) throw PreconditionError("graph needs at least one vertex");
  if (d < 0 || d > n - 1) {
    throw PreconditionError("degree " + std::to_string(d) + " outside [0, n-1] for n=" +
                            std::to_string(n));
  }
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    throw ParityError("n*d is odd (n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }
  if (edges.size() != static_cast<std::size_t>(n) * d / 2) {
    throw PreconditionError("expected " + std::to_string(static_cast<long long>(n) * d / 2) +
                            " edges, got " + std::to_string(edges.size()));
  }

  adj_.assign(static_cast<std::size_t>(n) * d, -1);
  std::vector<int> fill(n, 0);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n) {
      throw PreconditionError("edge endpoint out of range");
    }
    if (e.u == e.v) throw PreconditionError("self-loop at vertex " + std::to_string(e.u));
    if (fill[e.u] == d || fill[e.v] == d) {
      throw PreconditionError("vertex degree exceeds " + std::to_string(d));
    }
    adj_[static_cast<std::size_t>(e.u) * d + fill[e.u]++] = e.v;
    adj_[static_cast<std::size_t>(e.v) * d + fill[e.v]++] = e.u;
  }
  for (int v = 0; v < n; ++v) {
    auto row = adj_.begin() + static_cast<std::ptrdiff_t>(v) * d;
    std::sort(row, row + d);
    if (std::adjacent_find(row, row + d) != row + d) {
      throw PreconditionError("repeated edge at vertex " + std::to_string(v));
    }
  }
  build_edges();
}

RegularGraph RegularGraph::complete(int n) {
  if (n < 1) throw PreconditionError("graph needs at least one vertex");
  RegularGraph g;
  g.n_ = n;
  g.d_ = n - 1;
  g.adj_.reserve(static_cast<std::size_t>(n) * (n - 1));
  for (int v = 0; v < n; ++v) {
    for (int w = 0; w < n; ++w) {
      if (w != v) g.adj_.push_back(w);
    }
  }
  g.build_edges();
  return g;
}

void RegularGraph::build_edges() {
  edges_.clear();
  edges_.reserve(static_cast<std::size_t>(n_) * d_ / 2);
  for (int u = 0; u < n_; ++u) {
    for (int v : neighbors(u)) {
      if (u < v) edges_.push_back({u, v});
    }
  }
}

bool RegularGraph::has_edge(int u, int v) const { return neighbor_index(u, v) >= 0; }

int RegularGraph::neighbor_index(int u, int v) const {
  auto row = neighbors(u);
  auto it = std::lower_bound(row.begin(), row.end(), v);
  if (it == row.end() || *it != v) return -1;
  return static_cast<int>(it - row.begin());
}

bool Multigraph::is_simple() const {
  std::vector<Edge> sorted;
  sorted.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) return false;
    sorted.push_back(canonical(e.u, e.v));
  }
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

std::vector<int> Multigraph::degrees() const {
  std::vector<int> deg(n, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

RegularGraph Multigraph::to_regular() const { return RegularGraph(n, d, edges); }

std::string switching_violation(const RegularGraph& g, const SwitchingCycle& c) {
  const int xs[4] = {c.x1, c.x2, c.x3, c.x4};
  for (int x : xs) {
    if (x < 0 || x >= g.n()) return "vertex " + std::to_string(x) + " out of range";
  }
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (xs[i] == xs[j]) return "cycle vertices are not distinct";
    }
  }
  if (!g.has_edge(c.x1, c.x2)) return "x1x2 is not an edge";
  if (!g.has_edge(c.x3, c.x4)) return "x3x4 is not an edge";
  if (g.has_edge(c.x1, c.x4)) return "x1x4 is already an edge";
  if (g.has_edge(c.x2, c.x3)) return "x2x3 is already an edge";
  return {};
}

RegularGraph apply_switching(const RegularGraph& g, const SwitchingCycle& c) {
  if (auto why = switching_violation(g, c); !why.empty()) {
    throw PreconditionError("invalid switching (" + std::to_string(c.x1) + "," +
                            std::to_string(c.x2) + "," + std::to_string(c.x3) + "," +
                            std::to_string(c.x4) + "): " + why);
  }
  const Edge removed1 = canonical(c.x1, c.x2);
  const Edge removed2 = canonical(c.x3, c.x4);
  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const Edge& e : g.edges()) {
    if (e != removed1 && e != removed2) edges.push_back(e);
  }
  edges.push_back(canonical(c.x1, c.x4));
  edges.push_back(canonical(c.x2, c.x3));
  return RegularGraph(g.n(), g.d(), edges);
}

void write_edge_list(std::ostream& out, const RegularGraph& g) {
  out << g.n() << ' ' << g.d() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

RegularGraph read_edge_list(std::istream& in) {
  long long n = 0, d = 0, m = 0;
  std::string line;
  if (!std::getline(in, line)) throw IoError("edge list: missing header line");
  std::istringstream header(line);
  if (!(header >> n >> d >> m)) throw IoError("edge list: malformed header '" + line + "'");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(std::max(0LL, m)));
  for (long long i = 0; i < m; ++i) {
    if (!std::getline(in, line)) {
      throw IoError("edge list: expected " + std::to_string(m) + " edges, found " +
                    std::to_string(i));
    }
    std::istringstream row(line);
    Edge e;
    if (!(row >> e.u >> e.v)) throw IoError("edge list: malformed edge line '" + line + "'");
    edges.push_back(e);
  }
  return RegularGraph(static_cast<int>(n), static_cast<int>(d), edges);
}

void save_edge_list(const std::string& path, const RegularGraph& g) {
  AtomicFile file(path);
  write_edge_list(file.stream(), g);
  file.commit();
}

RegularGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return read_edge_list(in);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace critperc
