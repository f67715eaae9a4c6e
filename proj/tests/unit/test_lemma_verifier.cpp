#include <doctest.h>

#include <algorithm>

#include "critperc/error.hpp"
#include "critperc/lemma_verifier.hpp"
#include "critperc/percolation.hpp"
#include "support.hpp"

using namespace critperc;

namespace {

struct Fixture {
  Input input;
  ExposureState state;
};

// Exploration state after `steps` steps on a cubic graph of order n.
Fixture explored(int n, int d, int steps, std::uint64_t seed) {
  Rng rng(seed);
  Input input = make_input(sample_regular(n, d, rng).graph, rng);
  Explorer ex(input, EdgeIndicator(seed, 1.0 / (d - 1)));
  for (int t = 0; t < steps && !ex.exhausted(); ++t) ex.step();
  ExposureState state = ex.snapshot();
  return {std::move(input), std::move(state)};
}

bool is_failed(const ExposureState& s, int a, int b) {
  return std::binary_search(s.failed.begin(), s.failed.end(), canonical(a, b));
}

// Direct enumeration of 4-tuples accepted by the switching precondition.
long oracle_forward(const RegularGraph& g, const ExposureState& s, int u, int v) {
  long count = 0;
  for (int x = 0; x < g.n(); ++x) {
    for (int y = 0; y < g.n(); ++y) {
      if (s.in_S[x] || s.in_S[y] || x == u || x == v || y == u || y == v) continue;
      if (switching_violation(g, {u, v, x, y}).empty()) ++count;
    }
  }
  return count;
}

long oracle_backward(const RegularGraph& g, const ExposureState& s, int u, int v) {
  long count = 0;
  for (int x2 = 0; x2 < g.n(); ++x2) {
    for (int x3 = 0; x3 < g.n(); ++x3) {
      if (s.in_S[x2] || is_failed(s, u, x2) || is_failed(s, v, x3)) continue;
      if (switching_violation(g, {u, x2, x3, v}).empty()) ++count;
    }
  }
  return count;
}

long oracle_up(const RegularGraph& g, const ExposureState& st, int v) {
  long count = 0;
  for (int a = 0; a < g.n(); ++a) {
    for (int b = 0; b < g.n(); ++b) {
      for (int s = 0; s < g.n(); ++s) {
        if (st.in_S[a] || st.in_S[b] || !st.in_S[s] || is_failed(st, s, b)) continue;
        if (switching_violation(g, {v, a, b, s}).empty()) ++count;
      }
    }
  }
  return count;
}

long oracle_down(const RegularGraph& g, const ExposureState& st, int v) {
  long count = 0;
  for (int s = 0; s < g.n(); ++s) {
    for (int x = 0; x < g.n(); ++x) {
      for (int y = 0; y < g.n(); ++y) {
        if (!st.in_S[s] || is_failed(st, v, s) || st.in_S[x] || st.in_S[y]) continue;
        if (switching_violation(g, {v, s, y, x}).empty()) ++count;
      }
    }
  }
  return count;
}

Trajectory trajectory_of(std::vector<std::tuple<bool, int, int>> kinds, int n, int d) {
  // (fresh, eta, S) rows for hand-built trajectories.
  Trajectory traj;
  traj.n = n;
  traj.d = d;
  long X = 0;
  int a = 0, c = 0;
  long t = 0;
  for (auto [fresh, eta, S] : kinds) {
    StepRecord r;
    r.t = ++t;
    r.fresh = fresh;
    r.indicator = fresh ? -1 : 1;
    r.eta = eta;
    X += eta;
    r.X = X;
    r.S_size = S;
    if (fresh) ++a; else ++c;
    r.starters = a;
    r.grown = c;
    traj.steps.push_back(r);
  }
  return traj;
}

}  // namespace

TEST_SUITE("lemma_verifier") {
  TEST_CASE("K4 forward bound is vacuous") {
    const RegularGraph k4 = RegularGraph::complete(4);
    ExposureState state{{1, 0, 0, 0}, {}};
    const SwitchingCount c = count_switchings_uv(k4, state, 0, 1);
    CHECK(c.uv_edge);
    CHECK(c.forward == 0);
    CHECK(c.bound_f == 12 - 6 - 18);
    CHECK(c.ok);
  }

  TEST_CASE("backward count vanishes when every edge at u is used") {
    const RegularGraph c6 = testing::cycle(6);
    // S = {0, 1, 5}: both neighbours of 0 are inside S.
    ExposureState state{{1, 1, 0, 0, 0, 1}, {}};
    const SwitchingCount c = count_switchings_uv(c6, state, 0, 3);
    CHECK_FALSE(c.uv_edge);
    CHECK(c.backward == 0);
    CHECK(c.bound_b == 0);
    CHECK(c.ok);
  }

  TEST_CASE("empty S gives no upward switchings") {
    const RegularGraph c6 = testing::cycle(6);
    ExposureState state{std::vector<char>(6, 0), {}};
    const KSwitchingCount k = count_switchings_k(c6, state, 2, 0);
    CHECK(k.up == 0);
    CHECK(k.bound_up == 0);
    CHECK(k.ok);
  }

  TEST_CASE("counts match enumeration of all switchings") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Fixture fx = explored(24, 3, 10 + static_cast<int>(seed) * 3, seed);
      const RegularGraph& g = fx.input.graph;
      for (int u = 0; u < g.n(); ++u) {
        if (!fx.state.in_S[u]) continue;
        for (int v = 0; v < g.n(); ++v) {
          if (fx.state.in_S[v]) continue;
          const SwitchingCount c = count_switchings_uv(g, fx.state, u, v);
          if (c.uv_edge) {
            REQUIRE(c.forward == oracle_forward(g, fx.state, u, v));
          } else {
            REQUIRE(c.backward == oracle_backward(g, fx.state, u, v));
          }
        }
      }
      for (int v = 0; v < g.n(); ++v) {
        if (fx.state.in_S[v]) continue;
        const int k = unexposed_into_S(g, fx.state, v);
        const KSwitchingCount kc = count_switchings_k(g, fx.state, v, k);
        REQUIRE(kc.up == oracle_up(g, fx.state, v));
        if (k >= 1) REQUIRE(kc.down == oracle_down(g, fx.state, v));
      }
    }
  }

  TEST_CASE("inconsistent states are rejected") {
    const RegularGraph c6 = testing::cycle(6);
    ExposureState state{{1, 0, 0, 0, 0, 0}, {}};
    CHECK_THROWS_AS(count_switchings_uv(c6, state, 1, 2), InconsistencyError);
    CHECK_THROWS_AS(count_switchings_uv(c6, state, 0, 0), InconsistencyError);
    CHECK_THROWS_AS(count_switchings_k(c6, state, 1, 0), InconsistencyError);
    CHECK_THROWS_AS(count_switchings_k(c6, state, 0, 0), InconsistencyError);
    ExposureState not_edge{{1, 0, 0, 0, 0, 0}, {{0, 3}}};
    CHECK_THROWS_AS(count_switchings_uv(c6, not_edge, 0, 3), InconsistencyError);
    ExposureState inside{{1, 1, 0, 0, 0, 0}, {{0, 1}}};
    CHECK_THROWS_AS(count_switchings_uv(c6, inside, 0, 3), InconsistencyError);
    ExposureState twice{{1, 0, 0, 0, 0, 0}, {{0, 1}, {1, 0}}};
    CHECK_THROWS_AS(count_switchings_uv(c6, twice, 0, 3), InconsistencyError);
    ExposureState short_state{{1, 0}, {}};
    CHECK_THROWS_AS(count_switchings_uv(c6, short_state, 0, 1), InconsistencyError);
  }

  TEST_CASE("switching suite at n = 200") {
    for (int d : {3, 10, 50}) {
      const SwitchingSuiteReport r = switching_suite(200, d, 100, 7);
      CHECK(r.all_ok());
      CHECK(r.forward_checked > 0);
      CHECK(r.backward_checked > 0);
      CHECK(r.up_checked >= 100);
      CHECK(r.down_checked > 0);
      CHECK(r.max_S <= 200 / 6 + 1);
    }
    CHECK_THROWS_AS(switching_suite(200, 3, 0, 1), PreconditionError);
  }

  TEST_CASE("one-sided bound checks") {
    const BoundCheck up = check_bound("x", 1.0, 0.1, 10, 1.2, true);
    CHECK(up.one_sided_limit == doctest::Approx(1.16448536));
    CHECK(up.pass);
    CHECK_FALSE(check_bound("x", 1.0, 0.2, 10, 1.2, true).pass);
    CHECK(check_bound("x", 1.0, 0.1, 10, 0.8, false).pass);
    CHECK_FALSE(check_bound("x", 1.0, 0.2, 10, 0.8, false).pass);
  }

  TEST_CASE("frontier moments without percolation") {
    // p = 0: every non-fresh step is a failure with eta = -1.
    FrontierAccumulator acc(1000, 10, 0.0);
    for (int r = 0; r < 5; ++r) acc.add(replicate_trajectory(1000, 10, 0.0, 3, r, 2000));
    CHECK(acc.eta().mean == doctest::Approx(-1.0));
    CHECK(acc.eta2().mean == doctest::Approx(1.0));
    CHECK(acc.eta().se == doctest::Approx(0.0));
    CHECK(acc.Z().mean == 0.0);
    const auto checks = acc.checks();
    REQUIRE(checks.size() == 5);
    CHECK_FALSE(checks[3].pass);  // 1 < d/4
    CHECK(checks[4].pass);
    CHECK(acc.replicates() == 5);
    FrontierAccumulator empty(1000, 10, 0.0);
    CHECK_THROWS_AS(empty.checks(), EmptySelectionError);
    CHECK_THROWS_AS(empty.add(replicate_trajectory(1000, 3, 0.0, 3, 0, 10)), PreconditionError);
  }

  TEST_CASE("frontier filter drops late steps") {
    FrontierAccumulator acc(1000, 3, 0.0, {5.0, 1000.0});
    acc.add(replicate_trajectory(1000, 3, 0.5, 1, 0, 100));
    CHECK(acc.Y().count == 6);
  }

  TEST_CASE("starter bound") {
    CHECK(starter_bound(0, 3) == 0);
    CHECK(starter_bound(1, 3) == 1);
    CHECK(starter_bound(15, 3) == 6);
    CHECK(starter_bound(16, 3) == 7);
    CHECK(starter_bound(25, 10) == 3);
  }

  TEST_CASE("growth check on hand-built trajectories") {
    // One starter then two grown vertices.
    const Trajectory traj = trajectory_of({{true, 3, 1}, {false, 1, 2}, {false, -1, 3}}, 1000, 3);
    const GrowthResult same = growth_check(traj, 2, 2, 0.1);
    CHECK(same.gain == 0);
    CHECK(same.lower_ok);
    CHECK(same.upper_ok);
    const GrowthResult r = growth_check(traj, 0, 3, 0.1);
    CHECK(r.gain == 3);
    CHECK(r.starters == 1);
    CHECK(r.grown == 2);
    CHECK(r.c_ok);
    CHECK(r.a_bound_ok);
    CHECK(r.lower_margin == doctest::Approx(3 - 1.5 + 10.0));
    CHECK(r.upper_margin == doctest::Approx(10.0 - (1.5 - 2)));
    CHECK_THROWS_AS(growth_check(traj, 2, 1, 0.1), RangeError);
    CHECK_THROWS_AS(growth_check(traj, -1, 1, 0.1), RangeError);
    CHECK_THROWS_AS(growth_check(traj, 0, 10, 0.1), RangeError);
    CHECK_THROWS_AS(growth_check(traj, 0, 20000, 0.1), RangeError);
  }

  TEST_CASE("growth tally at p = 1 uses one starter") {
    const Trajectory traj = replicate_trajectory(1000, 3, 1.0, 2, 0, 300);
    const GrowthResult r = growth_check(traj, 0, 300, 0.1);
    CHECK(r.starters == 1);
    GrowthTally tally;
    tally.add(r);
    CHECK(tally.trials == 1);
    CHECK(GrowthTally{}.pass() == false);
  }

  TEST_CASE("exact edge probability") {
    CHECK(make_rational(6, -4) == Rational{-3, 2});
    CHECK(make_rational(0, 5) == Rational{0, 1});
    CHECK_THROWS_AS(make_rational(1, 0), PreconditionError);
    CHECK(exact_edge_probability(6, 3, {}, {}, {}, 0, 1) == Rational{3, 5});
    CHECK(exact_edge_probability(6, 3, {0}, {}, {{0, 1}}, 1, 2) == Rational{1, 2});
    CHECK(exact_edge_probability(6, 3, {0}, {}, {{0, 1}}, 0, 2) == Rational{1, 2});
    CHECK(exact_edge_probability(4, 3, {0, 1}, {{0, 1}}, {}, 2, 3) == Rational{1, 1});

    // Same conditional law by filtering the subset-enumeration oracle.
    const auto all = testing::brute_force_regular(6, 3);
    long cond = 0, hit = 0;
    for (const auto& edges : all) {
      auto has = [&](int a, int b) { return std::binary_search(edges.begin(), edges.end(), canonical(a, b)); };
      if (!has(0, 1) || has(0, 2)) continue;  // S = {0, 2}, H empty, F = {01}
      ++cond;
      hit += has(1, 3) ? 1 : 0;
    }
    CHECK(exact_edge_probability(6, 3, {0, 2}, {}, {{0, 1}}, 1, 3) == make_rational(hit, cond));

    CHECK_THROWS_AS(exact_edge_probability(10, 3, {}, {}, {}, 0, 1), CapExceededError);
    CHECK_THROWS_AS(exact_edge_probability(4, 3, {0, 1}, {}, {}, 2, 3), EmptySelectionError);
    CHECK_THROWS_AS(exact_edge_probability(6, 3, {}, {}, {}, 1, 1), PreconditionError);
    CHECK_THROWS_AS(exact_edge_probability(6, 3, {0}, {{0, 1}}, {}, 2, 3), PreconditionError);
  }

  TEST_CASE("sampled frequency agrees with the exact value") {
    const EdgeFrequencyCheck c = empirical_edge_frequency(6, 3, {0}, {}, {{0, 1}}, 1, 2, 20000, 5);
    CHECK(c.exact == Rational{1, 2});
    CHECK(c.conditioned > 0);
    CHECK(c.test.p_value > 1e-3);
    const EdgeFrequencyCheck sure = empirical_edge_frequency(4, 3, {}, {}, {}, 0, 1, 100, 5);
    CHECK(sure.frequency == 1.0);
    CHECK(sure.test.p_value == 1.0);
  }
}
