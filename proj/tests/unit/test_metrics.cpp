#include <doctest.h>

#include <cmath>

#include "critperc/error.hpp"
#include "critperc/metrics.hpp"
#include "critperc/percolation.hpp"
#include "critperc/sampler.hpp"
#include "support.hpp"

using namespace critperc;

namespace {

// Mixing time by evolving every start distribution under the dense lazy
// walk matrix.
long dense_mixing_time(int m, const std::vector<Edge>& edges, double eps) {
  if (m == 1) return 0;
  std::vector<std::vector<double>> P(m, std::vector<double>(m, 0.0));
  std::vector<int> deg(m, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  for (const Edge& e : edges) {
    P[e.u][e.v] += 0.5 / deg[e.u];
    P[e.v][e.u] += 0.5 / deg[e.v];
  }
  for (int v = 0; v < m; ++v) P[v][v] += 0.5;
  std::vector<double> pi(m);
  for (int v = 0; v < m; ++v) pi[v] = deg[v] / (2.0 * static_cast<double>(edges.size()));
  std::vector<std::vector<double>> dist(m, std::vector<double>(m, 0.0));
  for (int x = 0; x < m; ++x) dist[x][x] = 1.0;
  for (long t = 1;; ++t) {
    double worst = 0.0;
    for (int x = 0; x < m; ++x) {
      std::vector<double> next(m, 0.0);
      for (int a = 0; a < m; ++a) {
        if (dist[x][a] == 0.0) continue;
        for (int b = 0; b < m; ++b) next[b] += dist[x][a] * P[a][b];
      }
      dist[x] = next;
      double tv = 0.0;
      for (int b = 0; b < m; ++b) tv += std::abs(next[b] - pi[b]);
      worst = std::max(worst, tv / 2);
    }
    if (worst <= eps + kTvSlack) return t;
  }
}

struct Piece {
  ComponentGraph graph;
  std::vector<Edge> local_edges;
};

// Connected components of a percolated cubic graph with sizes in [lo, hi].
std::vector<Piece> pieces(int n, double p, int lo, int hi, std::uint64_t seed) {
  Rng rng(seed);
  const RegularGraph g = sample_uniform_rejection(n, 3, rng, 100000);
  const auto out = percolate(g, EdgeIndicator(seed, p));
  std::vector<Piece> result;
  for (int id = 0; id < static_cast<int>(out.component_size_by_id.size()); ++id) {
    const int size = out.component_size_by_id[id];
    if (size < lo || size > hi) continue;
    Piece piece{component_subgraph(out, id), {}};
    for (int v = 0; v < piece.graph.size(); ++v) {
      for (int w : piece.graph.neighbors(v)) {
        if (v < w) piece.local_edges.push_back({v, w});
      }
    }
    result.push_back(std::move(piece));
  }
  return result;
}

ComponentGraph path(int m) {
  std::vector<Edge> edges;
  for (int v = 0; v + 1 < m; ++v) edges.push_back({v, v + 1});
  return ComponentGraph(m, edges);
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("largest components") {
    const RegularGraph k4 = RegularGraph::complete(4);
    // A key whose realisation on K4 keeps exactly 01 and 23.
    std::optional<PercolationOutcome> found;
    for (std::uint64_t key = 0; key < 100000 && !found; ++key) {
      auto out = percolate(k4, EdgeIndicator(key, 0.5));
      if (out.retained_edges == std::vector<Edge>{{0, 1}, {2, 3}}) found = std::move(out);
    }
    REQUIRE(found.has_value());
    const auto top = largest_components(*found, 3);
    REQUIRE(top.size() == 2);
    CHECK(top[0].size == 2);
    CHECK(top[1].size == 2);
    CHECK(largest_components(*found, 0).empty());
    CHECK_THROWS_AS(largest_components(*found, -1), PreconditionError);
    const ComponentGraph c = component_subgraph(*found, found->component_id[2]);
    CHECK(c.size() == 2);
    CHECK(c.global_ids() == std::vector<int>{2, 3});
    CHECK(c.edge_count() == 1);
  }

  TEST_CASE("diameters") {
    CHECK(diameter(from_regular_graph(RegularGraph::complete(4))) == 1);
    CHECK(diameter(path(4)) == 3);
    CHECK(diameter(from_regular_graph(testing::cycle(6))) == 3);
    CHECK(diameter(from_regular_graph(RegularGraph::complete(30))) == 1);
    CHECK(diameter(ComponentGraph(1, {})) == 0);
    const std::vector<Edge> split{{0, 1}, {2, 3}};
    CHECK_THROWS_AS(diameter(ComponentGraph(4, split)), DisconnectedError);
    CHECK_THROWS_AS(mixing_time(ComponentGraph(4, split)), DisconnectedError);
  }

  TEST_CASE("mixing on trivial components") {
    CHECK(mixing_time(ComponentGraph(1, {})).t_mix == 0);
    const std::vector<Edge> one{{0, 1}};
    const MixingResult k2 = mixing_time(ComponentGraph(2, one));
    CHECK(k2.t_mix == 1);
    CHECK(k2.is_exact);
  }

  TEST_CASE("small components against dense matrix powers") {
    const ComponentGraph c4 = from_regular_graph(testing::cycle(4));
    const std::vector<Edge> c4_edges = testing::cycle(4).edges();
    CHECK(mixing_time(c4).t_mix == dense_mixing_time(4, c4_edges, 0.25));
    CHECK(mixing_time_spectral(c4, 0.25) == dense_mixing_time(4, c4_edges, 0.25));
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (const Piece& piece : pieces(60, 0.6, 2, 16, seed)) {
        const long oracle = dense_mixing_time(piece.graph.size(), piece.local_edges, 0.25);
        REQUIRE(mixing_time_sparse(piece.graph, 0.25) == oracle);
        REQUIRE(mixing_time_spectral(piece.graph, 0.25) == oracle);
        ++checked;
      }
    }
    CHECK(checked > 50);
  }

  TEST_CASE("spectral and sparse agree on mid-sized components") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      for (const Piece& piece : pieces(400, 0.8, 100, 400, seed)) {
        const long sparse = mixing_time_sparse(piece.graph, 0.25);
        const long spectral = mixing_time_spectral(piece.graph, 0.25);
        CHECK(sparse == spectral);
        MixingOptions options;
        options.sparse_limit = 0;
        const MixingResult r = mixing_time(piece.graph, options);
        CHECK(r.method == MixingMethod::Spectral);
        CHECK(r.t_mix == spectral);
        for (double eps : {0.1, 0.4}) {
          CHECK(mixing_time_sparse(piece.graph, eps) == mixing_time_spectral(piece.graph, eps));
        }
        ++checked;
      }
    }
    CHECK(checked >= 5);
  }

  TEST_CASE("smaller eps needs at least as many steps") {
    const auto ps = pieces(400, 0.8, 100, 400, 3);
    REQUIRE_FALSE(ps.empty());
    const ComponentGraph& c = ps.front().graph;
    const long loose = mixing_time_sparse(c, 0.4);
    const long mid = mixing_time_sparse(c, 0.25);
    const long tight = mixing_time_sparse(c, 0.1);
    CHECK(loose <= mid);
    CHECK(mid <= tight);
    CHECK_THROWS_AS(mixing_time(c, {.eps = 0.0}), PreconditionError);
  }

  TEST_CASE("estimate above the exact cap is a flagged lower bound") {
    const auto ps = pieces(400, 0.8, 100, 400, 5);
    REQUIRE_FALSE(ps.empty());
    const ComponentGraph& c = ps.front().graph;
    MixingOptions options;
    options.exact_cap = 50;
    options.estimate_starts = 8;
    const MixingResult est = mixing_time(c, options);
    CHECK_FALSE(est.is_exact);
    CHECK(est.method == MixingMethod::SparseEstimate);
    CHECK(est.t_mix <= mixing_time_sparse(c, 0.25));
    CHECK(mixing_time(c, options).t_mix == est.t_mix);
  }
}
