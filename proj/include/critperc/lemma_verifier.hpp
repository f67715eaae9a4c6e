#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "critperc/exploration.hpp"
#include "critperc/graph.hpp"
#include "critperc/sampler.hpp"
#include "critperc/stats.hpp"

namespace critperc {

// Switching counts around a pair u in S, v outside S, for a graph g that is
// consistent with the exposure state (F bipartite across S and V\S, F in g).
struct SwitchingCount {
  bool uv_edge = false;
  long forward = 0;   // uv in E: ordered edges xy usable to delete uv
  long backward = 0;  // uv not in E: switchings that would create uv
  long bound_f = 0;   // dn - 2d|S| - 2d^2 (may be negative: vacuous)
  long bound_b = 0;   // d (d - d_H(u) - d_F(u))
  bool ok = false;
};

SwitchingCount count_switchings_uv(const RegularGraph& g, const ExposureState& state, int u, int v);

// Switchings changing k = d_{G,S}(v) - d_F(v), the number of unexposed edges
// from v into S.
struct KSwitchingCount {
  int k = 0;
  long up = 0;
  long down = 0;
  long bound_up = 0;    // d^2 |S|
  long bound_down = 0;  // k (dn - 2d|S| - 2d^2); only checked when k >= 1
  bool ok = false;
};

// Throws InconsistencyError when k does not match the state.
KSwitchingCount count_switchings_k(const RegularGraph& g, const ExposureState& state, int v, int k);
int unexposed_into_S(const RegularGraph& g, const ExposureState& state, int v);

struct SwitchingSuiteReport {
  int n = 0;
  int d = 0;
  int trials = 0;
  long forward_checked = 0, forward_pass = 0;
  long backward_checked = 0, backward_pass = 0;
  long up_checked = 0, up_pass = 0;
  long down_checked = 0, down_pass = 0;
  int max_S = 0;

  bool all_ok() const {
    return forward_pass == forward_checked && backward_pass == backward_checked &&
           up_pass == up_checked && down_pass == down_checked;
  }
};

// Exploration-generated states on sampled graphs with |S| <= n/6.
SwitchingSuiteReport switching_suite(int n, int d, int trials, std::uint64_t seed);

// One-sided comparison of an estimated mean against a bound at the 95% level:
// an upper bound passes when mean + 1.645 se <= bound, a lower bound when
// mean - 1.645 se >= bound.
struct BoundCheck {
  std::string name;
  double observed = 0.0;
  double se = 0.0;
  double one_sided_limit = 0.0;
  double bound = 0.0;
  bool upper = true;
  long count = 0;
  bool pass = false;
};

BoundCheck check_bound(std::string name, double mean, double se, long count, double bound, bool upper);

struct FrontierFilter {
  double t_limit = 0.0;  // steps whose previous time exceeds this are dropped
  double S_limit = 0.0;  // likewise for |S| before the step
};

// d n^{2/3} and 5 n^{2/3}.
FrontierFilter default_frontier_filter(int n, int d);

// Pooled means over qualifying steps of many trajectories; standard errors
// treat each trajectory as one cluster (delta method for the ratio).
class FrontierAccumulator {
 public:
  FrontierAccumulator(int n, int d, double mu);
  FrontierAccumulator(int n, int d, double mu, FrontierFilter filter);

  void add(const Trajectory& traj);

  struct Moment {
    double mean = 0.0;
    double se = 0.0;
    long count = 0;
  };

  Moment Y() const { return ratio(0); }
  Moment Z() const { return ratio(1); }
  Moment eta() const { return ratio(2); }   // X > 0 steps
  Moment eta2() const { return ratio(3); }  // X > 0 steps
  // Mean of eta^2 on fresh steps (X = 0); reported, no verdict.
  Moment eta2_fresh() const { return ratio(4); }

  // EY <= 20 d n^{-1/3}, EZ <= 180 d n^{-1/3}, E eta >= -(570 + mu) n^{-1/3},
  // d/4 <= E eta^2 <= d. Throws EmptySelectionError when no step qualifies.
  std::vector<BoundCheck> checks() const;

  int replicates() const { return static_cast<int>(clusters_.size()); }

 private:
  static constexpr int kStats = 5;
  struct Cluster {
    double sum[kStats] = {0, 0, 0, 0, 0};
    long count[kStats] = {0, 0, 0, 0, 0};
  };
  Moment ratio(int which) const;

  int n_;
  int d_;
  double mu_;
  FrontierFilter filter_;
  std::vector<Cluster> clusters_;
};

struct GrowthResult {
  long gain = 0;
  double lower_margin = 0.0;  // gain - (t2 - t1)/(d-1) + delta n^{2/3}
  double upper_margin = 0.0;  // delta n^{2/3} - (gain - (t2 - t1)/(d-1) - ceil(t2/(5d/6)))
  bool lower_ok = false;
  bool upper_ok = false;
  bool a_bound_ok = false;
  bool c_ok = false;
  int starters = 0;
  int grown = 0;
};

// Throws RangeError unless 0 <= t1 <= t2 <= 5 d n^{2/3} and the trajectory
// covers t2 (or was exhausted earlier).
GrowthResult growth_check(const Trajectory& traj, long t1, long t2, double delta);

// ceil(t / (5d/6)) in exact integer arithmetic: ceil(6t / 5d).
long starter_bound(long t, int d);

struct Rational {
  long long num = 0;
  long long den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

Rational make_rational(long long num, long long den);

// P[uv in E | G[S] = H, F subset of E] over the uniform law on labelled
// d-regular graphs on n vertices, by enumeration. H lists the edges of the
// induced graph on S. Throws CapExceededError beyond the enumeration cap and
// EmptySelectionError when no graph satisfies the conditioning.
Rational exact_edge_probability(int n, int d, const std::vector<int>& S, const std::vector<Edge>& H,
                                const std::vector<Edge>& F, int u, int v);

// Sampled graph, uniform label permutations and an exploration run of up to
// t_max steps; streams keyed by (seed, n, d, replicate).
Trajectory replicate_trajectory(int n, int d, double p, std::uint64_t seed, int replicate, long t_max,
                                const SamplerPolicy& policy = {});

struct GrowthTally {
  int trials = 0;
  int lower_ok = 0;
  int upper_ok = 0;
  int a_violations = 0;  // a_bound_ok false (only possible when c_ok)
  int c_violations = 0;

  void add(const GrowthResult& r);
  // lower_ok and upper_ok in at least `min_rate` of trials, a-bound
  // violations in at most 1 - min_rate.
  bool pass(double min_rate = 0.99) const;
};

// Frequency of uv among uniform samples that satisfy the conditioning,
// against the exact enumeration value (one degree of freedom chi-square).
struct EdgeFrequencyCheck {
  Rational exact;
  long samples = 0;
  long conditioned = 0;
  long with_uv = 0;
  double frequency = 0.0;
  ChiSquare test;
};

EdgeFrequencyCheck empirical_edge_frequency(int n, int d, const std::vector<int>& S,
                                            const std::vector<Edge>& H, const std::vector<Edge>& F,
                                            int u, int v, long samples, std::uint64_t seed);

}  // namespace critperc
