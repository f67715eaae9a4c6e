#include "critperc/lemma_verifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <set>

#include "critperc/error.hpp"
#include "critperc/percolation.hpp"
#include "critperc/sampler.hpp"

namespace critperc {

namespace {

// Read-only view of (S, F) with per-vertex failed degrees and fast lookup.
class StateView {
 public:
  StateView(const RegularGraph& g, const ExposureState& state)
      : g_(g), in_S_(state.in_S), failed_(state.failed), dF_(g.n(), 0) {
    if (static_cast<int>(in_S_.size()) != g.n()) {
      throw InconsistencyError("exposure state has the wrong number of vertices");
    }
    for (int v = 0; v < g.n(); ++v) S_size_ += in_S_[v] ? 1 : 0;
    for (Edge& e : failed_) e = canonical(e.u, e.v);
    std::sort(failed_.begin(), failed_.end());
    if (std::adjacent_find(failed_.begin(), failed_.end()) != failed_.end()) {
      throw InconsistencyError("failed edge listed twice");
    }
    for (const Edge& e : failed_) {
      if (e.u < 0 || e.v >= g.n() || !g.has_edge(e.u, e.v)) {
        throw InconsistencyError("failed edge is not an edge of the graph");
      }
      if ((in_S_[e.u] != 0) == (in_S_[e.v] != 0)) {
        throw InconsistencyError("failed edge does not cross between S and its complement");
      }
      ++dF_[e.u];
      ++dF_[e.v];
    }
  }

  bool in_S(int v) const { return in_S_[v] != 0; }
  int S_size() const { return S_size_; }
  int dF(int v) const { return dF_[v]; }
  bool failed(int a, int b) const {
    return std::binary_search(failed_.begin(), failed_.end(), canonical(a, b));
  }
  int dH(int u) const {
    int count = 0;
    for (int s : g_.neighbors(u)) count += in_S(s) ? 1 : 0;
    return count;
  }
  void check_vertex(int v) const {
    if (v < 0 || v >= g_.n()) throw InconsistencyError("vertex out of range");
  }

 private:
  const RegularGraph& g_;
  const std::vector<char>& in_S_;
  std::vector<Edge> failed_;
  std::vector<int> dF_;
  int S_size_ = 0;
};

long base_bound(long n, long d, long S) { return d * n - 2 * d * S - 2 * d * d; }

}  // namespace

SwitchingCount count_switchings_uv(const RegularGraph& g, const ExposureState& state, int u, int v) {
  StateView view(g, state);
  view.check_vertex(u);
  view.check_vertex(v);
  if (!view.in_S(u)) throw InconsistencyError("u must lie in S");
  if (view.in_S(v)) throw InconsistencyError("v must lie outside S");
  const long n = g.n();
  const long d = g.d();
  SwitchingCount out;
  out.uv_edge = g.has_edge(u, v);
  out.bound_f = base_bound(n, d, view.S_size());
  out.bound_b = d * (d - view.dH(u) - view.dF(u));
  if (out.uv_edge) {
    // Ordered edges xy outside S and {u, v}: switching (u, v, x, y) deletes
    // uv, xy and adds uy, vx.
    for (int x = 0; x < n; ++x) {
      if (view.in_S(x) || x == u || x == v || g.has_edge(v, x)) continue;
      for (int y : g.neighbors(x)) {
        if (view.in_S(y) || y == u || y == v || g.has_edge(u, y)) continue;
        ++out.forward;
      }
    }
    out.ok = out.forward >= out.bound_f;
  } else {
    // Reverse switchings creating uv: pick a free semi-edge u x2 and an edge
    // v x3 with v x3 not failed; delete both, add uv and x2 x3.
    for (int x2 : g.neighbors(u)) {
      if (view.in_S(x2) || view.failed(u, x2)) continue;
      for (int x3 : g.neighbors(v)) {
        if (view.failed(v, x3) || x2 == x3 || g.has_edge(x2, x3)) continue;
        ++out.backward;
      }
    }
    out.ok = out.backward <= out.bound_b;
  }
  return out;
}

int unexposed_into_S(const RegularGraph& g, const ExposureState& state, int v) {
  StateView view(g, state);
  view.check_vertex(v);
  int k = 0;
  for (int s : g.neighbors(v)) k += (view.in_S(s) && !view.failed(v, s)) ? 1 : 0;
  return k;
}

KSwitchingCount count_switchings_k(const RegularGraph& g, const ExposureState& state, int v, int k) {
  StateView view(g, state);
  view.check_vertex(v);
  if (view.in_S(v)) throw InconsistencyError("v must lie outside S");
  if (unexposed_into_S(g, state, v) != k) {
    throw InconsistencyError("k does not match d_{G,S}(v) - d_F(v)");
  }
  const long n = g.n();
  const long d = g.d();
  KSwitchingCount out;
  out.k = k;
  out.bound_up = d * d * view.S_size();
  out.bound_down = k * base_bound(n, d, view.S_size());
  // Up: delete va and sb (s in S not adjacent to v, sb unexposed), add vs and ab.
  for (int a : g.neighbors(v)) {
    if (view.in_S(a)) continue;
    for (int s = 0; s < n; ++s) {
      if (!view.in_S(s) || g.has_edge(v, s)) continue;
      for (int b : g.neighbors(s)) {
        if (view.in_S(b) || view.failed(s, b) || a == b || g.has_edge(a, b)) continue;
        ++out.up;
      }
    }
  }
  // Down: delete vs (unexposed, s in S) and an ordered edge xy outside S,
  // add vx and sy.
  if (k >= 1) {
    for (int s : g.neighbors(v)) {
      if (!view.in_S(s) || view.failed(v, s)) continue;
      for (int x = 0; x < n; ++x) {
        if (view.in_S(x) || x == v || g.has_edge(v, x)) continue;
        for (int y : g.neighbors(x)) {
          if (view.in_S(y) || g.has_edge(s, y)) continue;
          ++out.down;
        }
      }
    }
  }
  out.ok = out.up <= out.bound_up && (k == 0 || out.down >= out.bound_down);
  return out;
}

SwitchingSuiteReport switching_suite(int n, int d, int trials, std::uint64_t seed) {
  if (trials < 1) throw PreconditionError("trials must be positive");
  SwitchingSuiteReport report;
  report.n = n;
  report.d = d;
  report.trials = trials;
  const double p = critical_p(d, 0.0, n);
  for (int trial = 0; trial < trials; ++trial) {
    Rng graph_rng(replicate_seed(seed, n, d, trial, Stream::Graph));
    Rng input_rng(replicate_seed(seed, n, d, trial, Stream::Input));
    Rng choice(replicate_seed(seed, n, d, trial, Stream::Choice));
    Input input = make_input(sample_regular(n, d, graph_rng).graph, input_rng);
    const RegularGraph& g = input.graph;
    Explorer explorer(input, EdgeIndicator(replicate_seed(seed, n, d, trial, Stream::Percolation), p));
    const int target = std::uniform_int_distribution<int>(1, std::max(1, n / 6))(choice);
    while (explorer.S_size() < target && !explorer.exhausted()) explorer.step();
    const ExposureState state = explorer.snapshot();
    report.max_S = std::max(report.max_S, state.S_size());

    std::vector<int> inside, outside;
    for (int v = 0; v < n; ++v) (state.in_S[v] ? inside : outside).push_back(v);
    if (inside.empty() || outside.empty()) continue;
    auto pick = [&](const std::vector<int>& from) {
      return from[std::uniform_int_distribution<std::size_t>(0, from.size() - 1)(choice)];
    };

    std::vector<Edge> crossing;
    for (int u : inside) {
      for (int v : g.neighbors(u)) {
        if (!state.in_S[v]) crossing.push_back({u, v});
      }
    }
    if (!crossing.empty()) {
      const Edge e = crossing[std::uniform_int_distribution<std::size_t>(0, crossing.size() - 1)(choice)];
      ++report.forward_checked;
      report.forward_pass += count_switchings_uv(g, state, e.u, e.v).ok ? 1 : 0;
    }
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const int u = pick(inside);
      const int v = pick(outside);
      if (g.has_edge(u, v)) continue;
      ++report.backward_checked;
      report.backward_pass += count_switchings_uv(g, state, u, v).ok ? 1 : 0;
      break;
    }
    // One uniformly chosen outside vertex, plus one with k >= 1 when any
    // exists so that the down count is exercised in most trials.
    auto check_k = [&](int v) {
      const KSwitchingCount kc = count_switchings_k(g, state, v, unexposed_into_S(g, state, v));
      ++report.up_checked;
      report.up_pass += kc.up <= kc.bound_up ? 1 : 0;
      if (kc.k >= 1) {
        ++report.down_checked;
        report.down_pass += kc.down >= kc.bound_down ? 1 : 0;
      }
    };
    check_k(pick(outside));
    std::vector<int> linked;
    for (int v : outside) {
      if (unexposed_into_S(g, state, v) >= 1) linked.push_back(v);
    }
    if (!linked.empty()) check_k(pick(linked));
  }
  return report;
}

BoundCheck check_bound(std::string name, double mean, double se, long count, double bound, bool upper) {
  BoundCheck c;
  c.name = std::move(name);
  c.observed = mean;
  c.se = se;
  c.count = count;
  c.bound = bound;
  c.upper = upper;
  constexpr double z = 1.6448536269514722;
  c.one_sided_limit = upper ? mean + z * se : mean - z * se;
  c.pass = upper ? c.one_sided_limit <= bound : c.one_sided_limit >= bound;
  return c;
}

FrontierFilter default_frontier_filter(int n, int d) {
  const double n13 = std::cbrt(static_cast<double>(n));
  return {d * n13 * n13, 5.0 * n13 * n13};
}

FrontierAccumulator::FrontierAccumulator(int n, int d, double mu)
    : FrontierAccumulator(n, d, mu, default_frontier_filter(n, d)) {}

FrontierAccumulator::FrontierAccumulator(int n, int d, double mu, FrontierFilter filter)
    : n_(n), d_(d), mu_(mu), filter_(filter) {}

void FrontierAccumulator::add(const Trajectory& traj) {
  if (traj.n != n_ || traj.d != d_) throw PreconditionError("trajectory does not match (n, d)");
  Cluster c;
  for (const StepRecord& rec : traj.steps) {
    if (static_cast<double>(rec.t - 1) > filter_.t_limit) break;
    if (static_cast<double>(rec.S_before()) > filter_.S_limit) continue;
    c.sum[0] += rec.Y;
    c.sum[1] += rec.Z;
    ++c.count[0];
    ++c.count[1];
    const double eta = rec.eta;
    if (rec.X_before() > 0) {
      c.sum[2] += eta;
      c.sum[3] += eta * eta;
      ++c.count[2];
      ++c.count[3];
    } else {
      c.sum[4] += eta * eta;
      ++c.count[4];
    }
  }
  clusters_.push_back(c);
}

FrontierAccumulator::Moment FrontierAccumulator::ratio(int which) const {
  Moment m;
  double total = 0.0;
  for (const Cluster& c : clusters_) {
    total += c.sum[which];
    m.count += c.count[which];
  }
  if (m.count == 0) return m;
  m.mean = total / m.count;
  const auto R = static_cast<double>(clusters_.size());
  if (clusters_.size() >= 2) {
    double ss = 0.0;
    for (const Cluster& c : clusters_) {
      const double r = c.sum[which] - m.mean * c.count[which];
      ss += r * r;
    }
    m.se = std::sqrt(R / (R - 1.0) * ss) / static_cast<double>(m.count);
  }
  return m;
}

std::vector<BoundCheck> FrontierAccumulator::checks() const {
  const Moment y = Y(), z = Z(), e = eta(), e2 = eta2();
  if (y.count == 0 || e.count == 0) throw EmptySelectionError("no step passes the frontier filters");
  const double n13 = std::cbrt(static_cast<double>(n_));
  std::vector<BoundCheck> out;
  out.push_back(check_bound("EY", y.mean, y.se, y.count, 20.0 * d_ / n13, true));
  out.push_back(check_bound("EZ", z.mean, z.se, z.count, 180.0 * d_ / n13, true));
  out.push_back(check_bound("Eeta", e.mean, e.se, e.count, -(570.0 + mu_) / n13, false));
  out.push_back(check_bound("Eeta2_lower", e2.mean, e2.se, e2.count, d_ / 4.0, false));
  out.push_back(check_bound("Eeta2_upper", e2.mean, e2.se, e2.count, static_cast<double>(d_), true));
  return out;
}

long starter_bound(long t, int d) {
  if (t <= 0) return 0;
  const long den = 5L * d;
  return (6L * t + den - 1) / den;
}

GrowthResult growth_check(const Trajectory& traj, long t1, long t2, double delta) {
  const double n13 = std::cbrt(static_cast<double>(traj.n));
  const double n23 = n13 * n13;
  if (t1 < 0 || t2 < t1) throw RangeError("growth check needs 0 <= t1 <= t2");
  if (static_cast<double>(t2) > 5.0 * traj.d * n23 + 1e-9) {
    throw RangeError("growth check needs t2 <= 5 d n^{2/3}");
  }
  if (t2 > static_cast<long>(traj.steps.size()) && !traj.exhausted) {
    throw RangeError("trajectory does not reach t2");
  }
  GrowthResult r;
  r.gain = traj.S_at(t2) - traj.S_at(t1);
  const double drift = static_cast<double>(t2 - t1) / (traj.d - 1);
  const double base = static_cast<double>(r.gain) - drift;
  const long sb = starter_bound(t2, traj.d);
  r.lower_margin = base + delta * n23;
  r.upper_margin = delta * n23 - (base - static_cast<double>(sb));
  r.lower_ok = r.lower_margin >= 0.0;
  r.upper_ok = r.upper_margin >= 0.0;
  r.starters = traj.starters_at(t2);
  r.grown = traj.grown_at(t2);
  r.c_ok = r.grown <= 8.0 * n23;
  r.a_bound_ok = !r.c_ok || r.starters <= sb;
  return r;
}

Rational make_rational(long long num, long long den) {
  if (den == 0) throw PreconditionError("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num, den);
  return g == 0 ? Rational{0, 1} : Rational{num / g, den / g};
}

Rational exact_edge_probability(int n, int d, const std::vector<int>& S, const std::vector<Edge>& H,
                                const std::vector<Edge>& F, int u, int v) {
  if (u < 0 || v < 0 || u >= n || v >= n || u == v) throw PreconditionError("invalid vertex pair");
  std::vector<char> in_S(n, 0);
  for (int s : S) {
    if (s < 0 || s >= n) throw PreconditionError("S vertex out of range");
    in_S[s] = 1;
  }
  std::set<Edge> h;
  for (const Edge& e : H) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || !in_S[e.u] || !in_S[e.v]) {
      throw PreconditionError("H must be a graph on S");
    }
    h.insert(canonical(e.u, e.v));
  }
  for (const Edge& e : F) {
    if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n || e.u == e.v) {
      throw PreconditionError("invalid failed edge");
    }
  }
  const std::vector<RegularGraph> all = enumerate_regular(n, d);
  long long matching = 0;
  long long with_uv = 0;
  for (const RegularGraph& g : all) {
    bool ok = true;
    for (std::size_t i = 0; ok && i < S.size(); ++i) {
      for (std::size_t j = i + 1; ok && j < S.size(); ++j) {
        if (S[i] == S[j]) continue;
        ok = g.has_edge(S[i], S[j]) == (h.count(canonical(S[i], S[j])) > 0);
      }
    }
    for (std::size_t i = 0; ok && i < F.size(); ++i) ok = g.has_edge(F[i].u, F[i].v);
    if (!ok) continue;
    ++matching;
    with_uv += g.has_edge(u, v) ? 1 : 0;
  }
  if (matching == 0) throw EmptySelectionError("no graph satisfies the conditioning");
  return make_rational(with_uv, matching);
}

}  // namespace critperc

namespace critperc {

Trajectory replicate_trajectory(int n, int d, double p, std::uint64_t seed, int replicate, long t_max,
                                const SamplerPolicy& policy) {
  Rng graph_rng(replicate_seed(seed, n, d, replicate, Stream::Graph));
  Rng input_rng(replicate_seed(seed, n, d, replicate, Stream::Input));
  const Input input = make_input(sample_regular(n, d, graph_rng, policy).graph, input_rng);
  RunOptions options;
  options.t_max = t_max;
  return run(input, EdgeIndicator(replicate_seed(seed, n, d, replicate, Stream::Percolation), p), options);
}

void GrowthTally::add(const GrowthResult& r) {
  ++trials;
  lower_ok += r.lower_ok ? 1 : 0;
  upper_ok += r.upper_ok ? 1 : 0;
  a_violations += r.a_bound_ok ? 0 : 1;
  c_violations += r.c_ok ? 0 : 1;
}

bool GrowthTally::pass(double min_rate) const {
  if (trials == 0) return false;
  return lower_ok >= min_rate * trials && upper_ok >= min_rate * trials &&
         a_violations <= (1.0 - min_rate) * trials + 1e-9;
}

EdgeFrequencyCheck empirical_edge_frequency(int n, int d, const std::vector<int>& S,
                                            const std::vector<Edge>& H, const std::vector<Edge>& F,
                                            int u, int v, long samples, std::uint64_t seed) {
  EdgeFrequencyCheck out;
  out.exact = exact_edge_probability(n, d, S, H, F, u, v);
  out.samples = samples;
  std::set<Edge> h;
  for (const Edge& e : H) h.insert(canonical(e.u, e.v));
  Rng rng(seed);
  for (long i = 0; i < samples; ++i) {
    const RegularGraph g = sample_uniform_rejection(n, d, rng, 1'000'000);
    bool ok = true;
    for (std::size_t a = 0; ok && a < S.size(); ++a) {
      for (std::size_t b = a + 1; ok && b < S.size(); ++b) {
        if (S[a] != S[b]) ok = g.has_edge(S[a], S[b]) == (h.count(canonical(S[a], S[b])) > 0);
      }
    }
    for (std::size_t a = 0; ok && a < F.size(); ++a) ok = g.has_edge(F[a].u, F[a].v);
    if (!ok) continue;
    ++out.conditioned;
    out.with_uv += g.has_edge(u, v) ? 1 : 0;
  }
  if (out.conditioned == 0) throw EmptySelectionError("no sample satisfied the conditioning");
  out.frequency = static_cast<double>(out.with_uv) / out.conditioned;
  const double p = out.exact.value();
  const double N = static_cast<double>(out.conditioned);
  if (p <= 0.0 || p >= 1.0) {
    // Degenerate law: any disagreement is impossible under the null.
    const bool agrees = (p <= 0.0) ? out.with_uv == 0 : out.with_uv == out.conditioned;
    out.test = {agrees ? 0.0 : std::numeric_limits<double>::infinity(), 1, agrees ? 1.0 : 0.0};
  } else {
    const double e1 = N * p, e0 = N * (1 - p);
    const double o1 = static_cast<double>(out.with_uv), o0 = N - o1;
    out.test.statistic = (o1 - e1) * (o1 - e1) / e1 + (o0 - e0) * (o0 - e0) / e0;
    out.test.dof = 1;
    out.test.p_value = chi_square_p_value(out.test.statistic, 1);
  }
  return out;
}

}  // namespace critperc
