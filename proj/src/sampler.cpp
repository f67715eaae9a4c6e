#include "critperc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "critperc/error.hpp"

namespace critperc {

namespace {

void check_parity(int n, int d) {
  if (n < 1) throw PreconditionError("n must be at least 1");
  if (d < 0) throw PreconditionError("d must be non-negative");
  if ((static_cast<long long>(n) * d) % 2 != 0) {
    throw ParityError("n*d is odd (n=" + std::to_string(n) + ", d=" + std::to_string(d) +
                      "); no d-regular graph exists");
  }
}

int uniform_index(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

// Scratch space for pairing attempts. Each attempt is a full uniform shuffle
// of the points; loops are screened in one sequential pass before the
// adjacency rows are built, which is where most attempts fail.
class PairingAttempt {
 public:
  PairingAttempt(int n, int d)
      : n_(n), d_(d), points_(static_cast<std::size_t>(n) * d),
        nb_(static_cast<std::size_t>(n) * d), fill_(n, 0) {
    std::iota(points_.begin(), points_.end(), 0);
  }

  bool run(Rng& rng) {
    std::shuffle(points_.begin(), points_.end(), rng);
    const std::size_t total = points_.size();
    for (std::size_t i = 0; i < total; i += 2) {
      if (points_[i] / d_ == points_[i + 1] / d_) return false;
    }
    std::fill(fill_.begin(), fill_.end(), 0);
    for (std::size_t i = 0; i < total; i += 2) {
      const int a = points_[i] / d_;
      const int b = points_[i + 1] / d_;
      if (adjacent(a, b)) return false;
      nb_[static_cast<std::size_t>(a) * d_ + fill_[a]++] = b;
      nb_[static_cast<std::size_t>(b) * d_ + fill_[b]++] = a;
    }
    return true;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(points_.size() / 2);
    for (std::size_t i = 0; i < points_.size(); i += 2) {
      out.push_back(canonical(points_[i] / d_, points_[i + 1] / d_));
    }
    return out;
  }

 private:
  bool adjacent(int a, int b) const {
    const int* row = nb_.data() + static_cast<std::size_t>(a) * d_;
    return std::find(row, row + fill_[a], b) != row + fill_[a];
  }

  int n_;
  int d_;
  std::vector<int> points_;
  std::vector<int> nb_;
  std::vector<int> fill_;
};

// Mutable graph used by the switching chain: sorted rows plus an indexable
// edge array for uniform edge proposals.
class ChainGraph {
 public:
  explicit ChainGraph(const RegularGraph& g)
      : n_(g.n()), d_(g.d()), adj_(static_cast<std::size_t>(g.n()) * g.d()), edges_(g.edges()) {
    for (int v = 0; v < n_; ++v) {
      auto row = g.neighbors(v);
      std::copy(row.begin(), row.end(), adj_.begin() + static_cast<std::ptrdiff_t>(v) * d_);
    }
  }

  bool propose(Rng& rng) {
    const int m = static_cast<int>(edges_.size());
    if (m < 2) return false;
    const int i = uniform_index(rng, 0, m - 1);
    const int j = uniform_index(rng, 0, m - 1);
    const bool flip = (rng() >> 63) != 0;
    if (i == j) return false;
    const int x1 = edges_[i].u;
    const int x2 = edges_[i].v;
    const int x3 = flip ? edges_[j].v : edges_[j].u;
    const int x4 = flip ? edges_[j].u : edges_[j].v;
    if (x1 == x3 || x1 == x4 || x2 == x3 || x2 == x4) return false;
    if (has(x1, x4) || has(x2, x3)) return false;
    replace(x1, x2, x4);
    replace(x2, x1, x3);
    replace(x3, x4, x2);
    replace(x4, x3, x1);
    edges_[i] = canonical(x1, x4);
    edges_[j] = canonical(x2, x3);
    return true;
  }

  RegularGraph to_graph() const { return RegularGraph(n_, d_, edges_); }

 private:
  bool has(int u, int v) const {
    const int* row = adj_.data() + static_cast<std::size_t>(u) * d_;
    return std::binary_search(row, row + d_, v);
  }

  void replace(int u, int old_value, int new_value) {
    int* row = adj_.data() + static_cast<std::size_t>(u) * d_;
    int pos = static_cast<int>(std::lower_bound(row, row + d_, old_value) - row);
    row[pos] = new_value;
    while (pos > 0 && row[pos - 1] > row[pos]) {
      std::swap(row[pos - 1], row[pos]);
      --pos;
    }
    while (pos + 1 < d_ && row[pos + 1] < row[pos]) {
      std::swap(row[pos + 1], row[pos]);
      ++pos;
    }
  }

  int n_;
  int d_;
  std::vector<int> adj_;
  std::vector<Edge> edges_;
};

}  // namespace

Multigraph sample_pairing(int n, int d, Rng& rng) {
  check_parity(n, d);
  std::vector<int> points(static_cast<std::size_t>(n) * d);
  std::iota(points.begin(), points.end(), 0);
  std::shuffle(points.begin(), points.end(), rng);
  Multigraph mg{n, d, {}};
  mg.edges.reserve(points.size() / 2);
  for (std::size_t i = 0; i < points.size(); i += 2) {
    const int a = points[i] / d;
    const int b = points[i + 1] / d;
    mg.edges.push_back(a <= b ? Edge{a, b} : Edge{b, a});
  }
  return mg;
}

RegularGraph sample_uniform_rejection(int n, int d, Rng& rng, long long max_attempts) {
  check_parity(n, d);
  if (d > n - 1) {
    throw PreconditionError("no simple " + std::to_string(d) + "-regular graph on " +
                            std::to_string(n) + " vertices");
  }
  if (d == n - 1) return RegularGraph::complete(n);
  if (d == 0) return RegularGraph(n, 0, {});
  PairingAttempt attempt(n, d);
  for (long long k = 0; k < max_attempts; ++k) {
    if (attempt.run(rng)) return RegularGraph(n, d, attempt.edges());
  }
  throw AttemptsExhaustedError("rejection sampler: no simple pairing in " +
                               std::to_string(max_attempts) + " attempts (n=" +
                               std::to_string(n) + ", d=" + std::to_string(d) + ")");
}

RegularGraph circulant_graph(int n, int d) {
  check_parity(n, d);
  if (d > n - 1) throw PreconditionError("circulant graph needs d <= n-1");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * d / 2);
  for (int k = 1; k <= d / 2; ++k) {
    for (int v = 0; v < n; ++v) edges.push_back(canonical(v, (v + k) % n));
  }
  if (d % 2 == 1) {
    for (int v = 0; v < n / 2; ++v) edges.push_back({v, v + n / 2});
  }
  return RegularGraph(n, d, edges);
}

RegularGraph sample_repaired_pairing(int n, int d, Rng& rng, std::uint64_t* repairs) {
  check_parity(n, d);
  if (d > n - 1) throw PreconditionError("repaired pairing needs d <= n-1");
  if (d == n - 1) return RegularGraph::complete(n);
  Multigraph mg = sample_pairing(n, d, rng);
  std::vector<Edge>& edges = mg.edges;
  std::vector<int> rows(static_cast<std::size_t>(n) * d);
  {
    std::vector<int> fill(n, 0);
    for (const Edge& e : edges) {
      rows[static_cast<std::size_t>(e.u) * d + fill[e.u]++] = e.v;
      rows[static_cast<std::size_t>(e.v) * d + fill[e.v]++] = e.u;
    }
  }
  auto multiplicity = [&](int u, int v) {
    const int* row = rows.data() + static_cast<std::size_t>(u) * d;
    return static_cast<int>(std::count(row, row + d, v)) / (u == v ? 2 : 1);
  };
  auto replace = [&](int u, int old_value, int new_value) {
    int* row = rows.data() + static_cast<std::size_t>(u) * d;
    *std::find(row, row + d, old_value) = new_value;
  };

  // A loop is a defect; for a repeated pair every copy but one is. Defective
  // pairs are rare, so they are found in the rows and then located in the
  // edge array by one sequential pass.
  std::vector<std::size_t> defects;
  {
    std::vector<Edge> bad;
    std::vector<char> flagged(n, 0);
    for (int u = 0; u < n; ++u) {
      int* row = rows.data() + static_cast<std::size_t>(u) * d;
      std::sort(row, row + d);
      for (int k = 0; k < d; ++k) {
        if (row[k] >= u && (row[k] == u || (k > 0 && row[k - 1] == row[k]))) {
          if (bad.empty() || bad.back() != Edge{u, row[k]}) bad.push_back({u, row[k]});
          flagged[u] = 1;
        }
      }
    }
    std::vector<int> seen(bad.size(), 0);
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const Edge& e = edges[k];
      if (!flagged[e.u]) continue;
      auto it = std::lower_bound(bad.begin(), bad.end(), e);
      if (it == bad.end() || *it != e) continue;
      // Keep the first copy of a repeated pair; every copy of a loop goes.
      if (seen[it - bad.begin()]++ > 0 || e.u == e.v) defects.push_back(k);
    }
  }

  const int m = static_cast<int>(edges.size());
  std::uint64_t count = 0;
  for (std::size_t i : defects) {
    for (;;) {
      const int j = uniform_index(rng, 0, m - 1);
      const bool flip = (rng() >> 63) != 0;
      if (static_cast<std::size_t>(j) == i) continue;
      const int a = edges[i].u;
      const int b = edges[i].v;
      const int c = flip ? edges[j].v : edges[j].u;
      const int e = flip ? edges[j].u : edges[j].v;
      if (c == e || multiplicity(c, e) != 1) continue;
      if (a == e || b == c || a == c || b == e) continue;
      if (multiplicity(a, e) != 0 || multiplicity(b, c) != 0) continue;
      replace(a, b, e);
      replace(b, a, c);
      replace(c, e, b);
      replace(e, c, a);
      edges[i] = canonical(a, e);
      edges[j] = canonical(b, c);
      ++count;
      break;
    }
  }
  if (repairs) *repairs = count;
  return RegularGraph(n, d, edges);
}

RegularGraph sample_switching_chain(int n, int d, Rng& rng, std::uint64_t burn_in,
                                    ChainStart start, ChainStats* stats) {
  check_parity(n, d);
  if (d > n - 1) throw PreconditionError("switching chain needs d <= n-1");
  RegularGraph initial = start == ChainStart::Circulant ? circulant_graph(n, d)
                                                        : sample_repaired_pairing(n, d, rng);
  if (burn_in == 0) {
    if (stats) *stats = {};
    return initial;
  }
  ChainGraph chain(initial);
  std::uint64_t accepted = 0;
  for (std::uint64_t k = 0; k < burn_in; ++k) accepted += chain.propose(rng) ? 1 : 0;
  if (stats) *stats = {burn_in, accepted};
  return chain.to_graph();
}

std::vector<RegularGraph> enumerate_regular(int n, int d, int cap) {
  if (n < 1 || d < 0) throw PreconditionError("enumeration needs n >= 1 and d >= 0");
  if ((static_cast<long long>(n) * d) % 2 != 0 || d > n - 1) return {};
  if (d == n - 1) return {RegularGraph::complete(n)};
  if (n > cap) {
    throw CapExceededError("enumeration cap exceeded: n=" + std::to_string(n) + " > " +
                           std::to_string(cap));
  }

  std::vector<int> deg(n, 0);
  std::vector<Edge> chosen;
  std::vector<std::vector<Edge>> found;

  // Vertex v picks all of its still-missing neighbours among w > v, so every
  // graph is produced by exactly one sequence of choices.
  std::function<void(int)> place;
  std::function<void(int, int, int)> choose = [&](int v, int from, int need) {
    if (need == 0) {
      place(v + 1);
      return;
    }
    for (int w = from; w < n; ++w) {
      if (deg[w] == d) continue;
      if (n - w < need) break;
      ++deg[v];
      ++deg[w];
      chosen.push_back({v, w});
      choose(v, w + 1, need - 1);
      chosen.pop_back();
      --deg[v];
      --deg[w];
    }
  };
  place = [&](int v) {
    if (v == n) {
      std::vector<Edge> edges = chosen;
      std::sort(edges.begin(), edges.end());
      found.push_back(std::move(edges));
      return;
    }
    choose(v, v + 1, d - deg[v]);
  };
  place(0);

  std::sort(found.begin(), found.end());
  std::vector<RegularGraph> graphs;
  graphs.reserve(found.size());
  for (const auto& edges : found) graphs.emplace_back(n, d, edges);
  return graphs;
}

std::vector<RegularGraph> enumerate_regular_by_pairings(int n, int d, int max_points,
                                                        std::vector<long long>* pairings_per_graph) {
  if (n < 1 || d < 0) throw PreconditionError("enumeration needs n >= 1 and d >= 0");
  if ((static_cast<long long>(n) * d) % 2 != 0 || d > n - 1) {
    if (pairings_per_graph) pairings_per_graph->clear();
    return {};
  }
  const int total = n * d;
  if (total > max_points) {
    throw CapExceededError("pairing enumeration cap exceeded: " + std::to_string(total) +
                           " points > " + std::to_string(max_points));
  }
  std::vector<char> matched(total, 0);
  std::vector<char> adjacent(static_cast<std::size_t>(n) * n, 0);
  std::vector<Edge> edges;
  std::map<std::vector<Edge>, long long> seen;

  std::function<void()> extend = [&]() {
    int p = 0;
    while (p < total && matched[p]) ++p;
    if (p == total) {
      std::vector<Edge> key = edges;
      std::sort(key.begin(), key.end());
      ++seen[key];
      return;
    }
    matched[p] = 1;
    const int a = p / d;
    for (int q = p + 1; q < total; ++q) {
      if (matched[q]) continue;
      const int b = q / d;
      if (a == b || adjacent[static_cast<std::size_t>(a) * n + b]) continue;
      matched[q] = 1;
      adjacent[static_cast<std::size_t>(a) * n + b] = adjacent[static_cast<std::size_t>(b) * n + a] = 1;
      edges.push_back(canonical(a, b));
      extend();
      edges.pop_back();
      adjacent[static_cast<std::size_t>(a) * n + b] = adjacent[static_cast<std::size_t>(b) * n + a] = 0;
      matched[q] = 0;
    }
    matched[p] = 0;
  };
  extend();

  std::vector<RegularGraph> graphs;
  if (pairings_per_graph) pairings_per_graph->clear();
  for (const auto& [key, count] : seen) {
    graphs.emplace_back(n, d, key);
    if (pairings_per_graph) pairings_per_graph->push_back(count);
  }
  return graphs;
}

SimpleProbabilityEstimate estimate_simple_probability(int n, int d, long long trials, Rng& rng) {
  check_parity(n, d);
  if (trials < 1) throw PreconditionError("trials must be at least 1");
  SimpleProbabilityEstimate est;
  est.trials = trials;
  if (d == 0) {
    est.simple = trials;
  } else {
    PairingAttempt attempt(n, d);
    for (long long k = 0; k < trials; ++k) {
      if (attempt.run(rng)) ++est.simple;
    }
  }
  est.fraction = static_cast<double>(est.simple) / static_cast<double>(trials);
  est.half_width = 1.96 * std::sqrt(est.fraction * (1.0 - est.fraction) / static_cast<double>(trials));
  return est;
}

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Auto: return "auto";
    case SamplerKind::Rejection: return "rejection";
    case SamplerKind::SwitchingChain: return "chain";
    case SamplerKind::RepairedChain: return "repaired";
    case SamplerKind::Complete: return "complete";
  }
  return "unknown";
}

SamplerKind parse_sampler_kind(std::string_view name) {
  for (SamplerKind k : {SamplerKind::Auto, SamplerKind::Rejection, SamplerKind::SwitchingChain,
                        SamplerKind::RepairedChain, SamplerKind::Complete}) {
    if (to_string(k) == name) return k;
  }
  throw PreconditionError("unknown sampler '" + std::string(name) +
                          "' (expected auto, rejection, chain, repaired or complete)");
}

double rejection_acceptance_estimate(int d) {
  return std::exp(-(static_cast<double>(d) * d - 1.0) / 4.0);
}

namespace {

std::uint64_t default_burn_in(int n, int d) {
  return 50ULL * static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(d);
}

SamplerKind chain_kind(int n, int d, const SamplerPolicy& policy) {
  return default_burn_in(n, d) <= policy.chain_budget ? SamplerKind::SwitchingChain
                                                      : SamplerKind::RepairedChain;
}

}  // namespace

SamplerKind resolve_sampler(int n, int d, const SamplerPolicy& policy) {
  if (policy.kind != SamplerKind::Auto) return policy.kind;
  if (d == n - 1) return SamplerKind::Complete;
  if (rejection_acceptance_estimate(d) >= policy.min_acceptance) return SamplerKind::Rejection;
  return chain_kind(n, d, policy);
}

SampledGraph sample_regular(int n, int d, Rng& rng, const SamplerPolicy& policy) {
  check_parity(n, d);
  const SamplerKind kind = resolve_sampler(n, d, policy);
  auto run_chain = [&](SamplerKind which) {
    ChainStats stats;
    if (which == SamplerKind::SwitchingChain) {
      auto g = sample_switching_chain(n, d, rng, policy.burn_in.value_or(default_burn_in(n, d)),
                                      ChainStart::Circulant, &stats);
      return SampledGraph{std::move(g), which, stats.proposals};
    }
    const std::uint64_t fallback =
        std::min<std::uint64_t>(static_cast<std::uint64_t>(n) * d / 2, policy.repaired_budget);
    auto g = sample_switching_chain(n, d, rng, policy.repaired_burn_in.value_or(fallback),
                                    ChainStart::RepairedPairing, &stats);
    return SampledGraph{std::move(g), which, stats.proposals};
  };

  switch (kind) {
    case SamplerKind::Complete:
      if (d != n - 1) throw PreconditionError("complete sampler requires d == n-1");
      return {RegularGraph::complete(n), kind, 0};
    case SamplerKind::Rejection:
      try {
        return {sample_uniform_rejection(n, d, rng, policy.max_attempts), kind, 0};
      } catch (const AttemptsExhaustedError&) {
        if (policy.kind != SamplerKind::Auto) throw;
        return run_chain(chain_kind(n, d, policy));
      }
    case SamplerKind::SwitchingChain:
    case SamplerKind::RepairedChain:
      return run_chain(kind);
    case SamplerKind::Auto:
      break;
  }
  throw InvariantError("unresolved sampler kind");
}

}  // namespace critperc
