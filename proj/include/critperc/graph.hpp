#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace critperc {

struct Edge {
  int u = 0;
  int v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge canonical(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// Simple labelled d-regular graph on {0, ..., n-1}. Each vertex keeps a
// sorted neighbour row; the canonical edge list (u < v, lexicographic) is
// derived from the rows. Immutable once built.
class RegularGraph {
 public:
  // Validates simplicity, symmetry, regularity and parity.
  RegularGraph(int n, int d, std::span<const Edge> edges);

  static RegularGraph complete(int n);

  int n() const { return n_; }
  int d() const { return d_; }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + static_cast<std::size_t>(v) * d_, static_cast<std::size_t>(d_)};
  }
  const std::vector<Edge>& edges() const { return edges_; }

  bool has_edge(int u, int v) const;
  // Position of v in u's sorted row, or -1.
  int neighbor_index(int u, int v) const;

  friend bool operator==(const RegularGraph& a, const RegularGraph& b) {
    return a.n_ == b.n_ && a.d_ == b.d_ && a.adj_ == b.adj_;
  }

 private:
  RegularGraph() = default;
  void build_edges();

  int n_ = 0;
  int d_ = 0;
  std::vector<int> adj_;
  std::vector<Edge> edges_;
};

// Pairing-model output: loops (u == v) and parallel edges allowed; a loop
// contributes two to its vertex's degree.
struct Multigraph {
  int n = 0;
  int d = 0;
  std::vector<Edge> edges;

  bool is_simple() const;
  std::vector<int> degrees() const;
  RegularGraph to_regular() const;
};

// Switching on the 4-cycle x1 x2 x3 x4: delete x1x2, x3x4; add x1x4, x2x3.
struct SwitchingCycle {
  int x1 = 0;
  int x2 = 0;
  int x3 = 0;
  int x4 = 0;

  // The switching on the same 4-cycle that undoes this one.
  SwitchingCycle reversed() const { return {x1, x4, x3, x2}; }

  friend bool operator==(const SwitchingCycle&, const SwitchingCycle&) = default;
};

// Empty when c is a valid switching for g; otherwise names the failed
// condition.
std::string switching_violation(const RegularGraph& g, const SwitchingCycle& c);

// Throws PreconditionError naming the failed condition.
RegularGraph apply_switching(const RegularGraph& g, const SwitchingCycle& c);

// Edge-list text format: header "n d m", then one "u v" line per edge with
// u < v in lexicographic order.
void write_edge_list(std::ostream& out, const RegularGraph& g);
RegularGraph read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const RegularGraph& g);
RegularGraph load_edge_list(const std::string& path);

}  // namespace critperc
