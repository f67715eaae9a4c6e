#include "critperc/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "critperc/error.hpp"

namespace critperc {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

void check_p(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("retention probability outside [0, 1]");
}

void finish_components(PercolationOutcome& out) {
  DisjointSets sets(out.n);
  for (const Edge& e : out.retained_edges) sets.unite(e.u, e.v);
  out.component_id.assign(out.n, -1);
  std::vector<int> id_of_root(out.n, -1);
  for (int v = 0; v < out.n; ++v) {
    int root = sets.find(v);
    if (id_of_root[root] < 0) {
      id_of_root[root] = static_cast<int>(out.component_size_by_id.size());
      out.component_size_by_id.push_back(0);
    }
    out.component_id[v] = id_of_root[root];
    ++out.component_size_by_id[id_of_root[root]];
  }
  out.component_sizes = out.component_size_by_id;
  std::sort(out.component_sizes.begin(), out.component_sizes.end(), std::greater<>());
}

}  // namespace

int PercolationOutcome::largest_component_id() const {
  auto it = std::max_element(component_size_by_id.begin(), component_size_by_id.end());
  return it == component_size_by_id.end() ? -1
                                          : static_cast<int>(it - component_size_by_id.begin());
}

PercolationOutcome percolate(const RegularGraph& g, const EdgeIndicator& indicator) {
  check_p(indicator.p());
  PercolationOutcome out;
  out.n = g.n();
  out.p = indicator.p();
  out.base_edge_count = g.edge_count();
  out.retained.resize(g.edge_count());
  for (std::size_t i = 0; i < g.edges().size(); ++i) {
    const Edge& e = g.edges()[i];
    if (indicator(e.u, e.v)) {
      out.retained[i] = 1;
      out.retained_edges.push_back(e);
    }
  }
  finish_components(out);
  return out;
}

PercolationOutcome percolate_complete(int n, const EdgeIndicator& indicator) {
  check_p(indicator.p());
  if (n < 1) throw PreconditionError("graph needs at least one vertex");
  PercolationOutcome out;
  out.n = n;
  out.p = indicator.p();
  out.base_edge_count = static_cast<std::size_t>(n) * (n - 1) / 2;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (indicator(u, v)) out.retained_edges.push_back({u, v});
    }
  }
  finish_components(out);
  return out;
}

PercolationOutcome percolate_complete_skip(int n, double p, std::uint64_t key) {
  check_p(p);
  if (n < 1) throw PreconditionError("graph needs at least one vertex");
  PercolationOutcome out;
  out.n = n;
  out.p = p;
  out.base_edge_count = static_cast<std::size_t>(n) * (n - 1) / 2;
  if (p > 0.0) {
    Rng rng(key);
    std::geometric_distribution<long long> gap(std::min(p, 1.0));
    // Row u holds the pairs (u, v) for v in (u, n); (u, v) = (0, 0) sits just
    // before the first pair.
    long long u = 0;
    long long v = 0;
    for (;;) {
      v += (p >= 1.0 ? 0 : gap(rng)) + 1;
      while (u < n - 1 && v >= n) {
        v = v - n + u + 2;
        ++u;
      }
      if (u >= n - 1) break;
      out.retained_edges.push_back({static_cast<int>(u), static_cast<int>(v)});
    }
  }
  finish_components(out);
  return out;
}

double critical_p(int d, double lambda, long long n) {
  if (d < 2) throw PreconditionError("critical_p needs d >= 2");
  if (n < 1) throw PreconditionError("critical_p needs n >= 1");
  const double p = (1.0 + lambda / std::cbrt(static_cast<double>(n))) / (d - 1);
  if (p < 0.0) {
    throw PreconditionError("critical_p: (1 + lambda n^{-1/3})/(d-1) is negative");
  }
  return std::min(p, 1.0);
}

void write_outcome_json(std::ostream& out, const PercolationOutcome& outcome, bool include_edges) {
  nlohmann::json row;
  row["n"] = outcome.n;
  row["p"] = outcome.p;
  row["base_edges"] = outcome.base_edge_count;
  row["retained_count"] = outcome.retained_edges.size();
  row["L1"] = outcome.largest();
  row["L2"] = outcome.second_largest();
  std::map<int, int> histogram;
  for (int s : outcome.component_sizes) ++histogram[s];
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [size, count] : histogram) hist.push_back({size, count});
  row["size_histogram"] = hist;
  if (include_edges) {
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : outcome.retained_edges) edges.push_back({e.u, e.v});
    row["retained"] = edges;
  }
  out << row.dump() << '\n';
}

}  // namespace critperc
