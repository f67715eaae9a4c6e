// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances and seeds are fixed below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "critperc/error.hpp"
#include "critperc/experiments.hpp"
#include "critperc/exploration.hpp"
#include "critperc/lemma_verifier.hpp"
#include "critperc/percolation.hpp"
#include "critperc/sampler.hpp"
#include "critperc/stats.hpp"

using namespace critperc;

namespace {

constexpr std::uint64_t kSeed = 20240601;

// C1
constexpr long kUniformDraws = 140000;
constexpr double kMinPValue = 1e-3;
constexpr double kC1Seconds = 120.0;
// C3
constexpr int kPartitionSeeds = 100;
// C4
constexpr int kSwitchingTrials = 100;
// C5 / C6
constexpr int kBigN = 1000000;
constexpr int kTrajectories = 100;
constexpr double kEtaBound = -0.0057;
constexpr double kYBound = 0.6;
constexpr double kZBound = 5.4;
constexpr double kEta2Low = 0.75;
constexpr double kEta2High = 3.0;
constexpr double kC5Seconds = 600.0;
constexpr double kDelta = 0.1;
constexpr int kGrowthMinOk = 99;
constexpr int kGrowthMaxViolations = 1;
// C7
constexpr int kScalingReplicates = 300;
constexpr double kRatioLow = 0.5;
constexpr double kRatioHigh = 2.0;
constexpr double kC7Seconds = 1800.0;
// C8
constexpr int kCorollaryReplicates = 100;
constexpr double kMixRatioLow = 1.0 / 3.0;
constexpr double kMixRatioHigh = 3.0;
constexpr double kC8Seconds = 1800.0;
// Exact mixing is required; the largest components at n=1e5 reach about 4.5 n^{2/3}.
constexpr int kC8ExactCap = 12000;
// C9
constexpr int kPhaseReplicates = 500;
constexpr double kPhaseA = 1e4;
constexpr double kTau1Bound = 0.12;
constexpr double kNotEBound = 0.13;

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Verdict sampler_uniformity() {
  const auto start = std::chrono::steady_clock::now();
  const auto backtrack = enumerate_regular(6, 3);
  const auto pairings = enumerate_regular_by_pairings(6, 3);
  bool same = backtrack.size() == pairings.size();
  for (std::size_t i = 0; same && i < backtrack.size(); ++i) same = backtrack[i] == pairings[i];
  std::map<std::vector<Edge>, int> index;
  for (std::size_t i = 0; i < backtrack.size(); ++i) index[backtrack[i].edges()] = static_cast<int>(i);
  std::vector<long> counts(backtrack.size(), 0);
  Rng rng(kSeed);
  bool in_support = true;
  for (long i = 0; i < kUniformDraws; ++i) {
    auto it = index.find(sample_uniform_rejection(6, 3, rng, 1'000'000).edges());
    if (it == index.end()) {
      in_support = false;
      break;
    }
    ++counts[it->second];
  }
  const ChiSquare chi = chi_square_uniform(counts);
  const double elapsed = seconds_since(start);
  return {same && in_support && chi.p_value > kMinPValue && elapsed < kC1Seconds,
          fmt("graphs=%zu strategies_agree=%s chi2=%.2f dof=%d p=%.4f runtime=%.1fs", backtrack.size(),
              same ? "yes" : "no", chi.statistic, chi.dof, chi.p_value, elapsed)};
}

Verdict k4_trajectory() {
  Rng rng(kSeed);
  int bad = 0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    const Input input = make_input(RegularGraph::complete(4), rng);
    const Trajectory traj = run(input, EdgeIndicator(derive_seed(kSeed, {static_cast<std::uint64_t>(s)}), 1.0),
                                {.t_max = 100});
    std::vector<long> X{0};
    for (const StepRecord& r : traj.steps) X.push_back(r.X);
    const StepRecord& last = traj.steps.back();
    if (X != std::vector<long>{0, 3, 4, 3, 0} || last.Y != 0 || last.Z != 2 || last.eta != -3) ++bad;
  }
  return {bad == 0, fmt("seeds=%d mismatches=%d", seeds, bad)};
}

Verdict lazy_matches_eager() {
  long violations = 0, checkpoints = 0;
  const double p = critical_p(3, 0.0, 100);
  for (int s = 0; s < kPartitionSeeds; ++s) {
    Rng graph_rng(replicate_seed(kSeed, 100, 3, s, Stream::Graph));
    Rng input_rng(replicate_seed(kSeed, 100, 3, s, Stream::Input));
    const Input input = make_input(sample_regular(100, 3, graph_rng).graph, input_rng);
    const EdgeIndicator indicator(replicate_seed(kSeed, 100, 3, s, Stream::Percolation), p);
    const PercolationOutcome truth = percolate(input.graph, indicator);
    Explorer ex(input, indicator);
    while (!ex.exhausted()) {
      ex.step();
      ++checkpoints;
      // Each explored component must sit inside one ground-truth component.
      std::map<int, int> owner;
      for (int v : ex.explored_order()) {
        auto [it, fresh] = owner.emplace(ex.component_of(v), truth.component_id[v]);
        if (!fresh && it->second != truth.component_id[v]) ++violations;
      }
    }
    std::map<int, int> sizes;
    for (int v = 0; v < 100; ++v) ++sizes[ex.component_of(v)];
    std::vector<int> explored_sizes;
    for (const auto& [id, size] : sizes) explored_sizes.push_back(size);
    std::sort(explored_sizes.rbegin(), explored_sizes.rend());
    if (explored_sizes != truth.component_sizes) ++violations;
  }
  return {violations == 0, fmt("seeds=%d checkpoints=%ld violations=%ld", kPartitionSeeds, checkpoints, violations)};
}

Verdict switching_counts() {
  bool ok = true;
  std::string detail;
  for (int d : {3, 10, 50}) {
    const SwitchingSuiteReport r = switching_suite(200, d, kSwitchingTrials, kSeed);
    ok = ok && r.all_ok() && r.forward_checked > 0 && r.backward_checked > 0 && r.up_checked > 0;
    detail += fmt("d=%d fwd=%ld/%ld bwd=%ld/%ld up=%ld/%ld down=%ld/%ld max|S|=%d; ", d, r.forward_pass,
                  r.forward_checked, r.backward_pass, r.backward_checked, r.up_pass, r.up_checked, r.down_pass,
                  r.down_checked, r.max_S);
  }
  return {ok, detail};
}

struct BigTrajectories {
  FrontierAccumulator frontier{kBigN, 3, 0.0};
  GrowthTally growth;
  long T1 = 0;
  double seconds = 0.0;
};

BigTrajectories big_trajectories() {
  const auto start = std::chrono::steady_clock::now();
  BigTrajectories out;
  const PhaseParameters pp = phase_parameters(kBigN, 3, 0.0, 1.0);
  out.T1 = pp.T1_steps;
  const FrontierFilter filter = default_frontier_filter(kBigN, 3);
  const long t_max = std::max<long>(out.T1, static_cast<long>(std::floor(filter.t_limit))) + 1;
  const double p = critical_p(3, 0.0, kBigN);
  std::vector<Trajectory> batch(static_cast<std::size_t>(threads()));
  for (int first = 0; first < kTrajectories; first += static_cast<int>(batch.size())) {
    const int count = std::min<int>(static_cast<int>(batch.size()), kTrajectories - first);
    parallel_for(count, threads(), [&](int i) {
      batch[i] = replicate_trajectory(kBigN, 3, p, kSeed, first + i, t_max);
    });
    for (int i = 0; i < count; ++i) {
      out.frontier.add(batch[i]);
      out.growth.add(growth_check(batch[i], 0, out.T1, kDelta));
    }
  }
  out.seconds = seconds_since(start);
  return out;
}

Verdict frontier_moments(const BigTrajectories& big) {
  const auto y = big.frontier.Y();
  const auto z = big.frontier.Z();
  const auto e = big.frontier.eta();
  const auto e2 = big.frontier.eta2();
  const std::vector<BoundCheck> checks{
      check_bound("EY", y.mean, y.se, y.count, kYBound, true),
      check_bound("EZ", z.mean, z.se, z.count, kZBound, true),
      check_bound("Eeta", e.mean, e.se, e.count, kEtaBound, false),
      check_bound("Eeta2_lower", e2.mean, e2.se, e2.count, kEta2Low, false),
      check_bound("Eeta2_upper", e2.mean, e2.se, e2.count, kEta2High, true),
  };
  bool ok = big.seconds < kC5Seconds;
  std::string detail;
  for (const BoundCheck& c : checks) {
    ok = ok && c.pass;
    detail += fmt("%s=%.5f(limit %.5f %s %.4f) ", c.name.c_str(), c.observed, c.one_sided_limit,
                  c.upper ? "<=" : ">=", c.bound);
  }
  detail += fmt("steps=%ld runtime=%.1fs", y.count, big.seconds);
  return {ok, detail};
}

Verdict growth_lemma(const BigTrajectories& big) {
  const GrowthTally& g = big.growth;
  const bool ok = g.trials == kTrajectories && g.lower_ok >= kGrowthMinOk && g.upper_ok >= kGrowthMinOk &&
                  g.a_violations <= kGrowthMaxViolations;
  return {ok, fmt("T1=%ld trials=%d lower_ok=%d upper_ok=%d a_violations=%d c_violations=%d", big.T1, g.trials,
                  g.lower_ok, g.upper_ok, g.a_violations, g.c_violations)};
}

ExperimentResult study(std::vector<int> n, int d, int replicates, std::uint64_t seed, bool diam = false,
                       bool mixing = false, int exact_cap = 5000) {
  ExperimentConfig c;
  c.n_values = std::move(n);
  c.d_values = {d};
  c.lambda_values = {0.0};
  c.replicates = replicates;
  c.seed = seed;
  c.threads = threads();
  c.diameter = diam;
  c.mixing = mixing;
  c.exact_cap = exact_cap;
  ExperimentResult r = scaling_study(c);
  for (const PointSummary& s : r.summaries) {
    if (s.error) throw Error("grid point n=" + std::to_string(s.point.n) + " failed: " + *s.error);
  }
  return r;
}

Verdict scaling_collapse() {
  const auto start = std::chrono::steady_clock::now();
  struct Case {
    const char* name;
    int d;
    std::vector<int> n;
  };
  const std::vector<Case> cases{{"d=3", 3, {100000, 1000000}},
                                {"d=10", 10, {100000, 1000000}},
                                {"d=n-1", kCompleteDegree, {10000, 30000}}};
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    const ExperimentResult r = study(c.n, c.d, kScalingReplicates, kSeed + 7);
    const double m0 = r.summaries[0].L1_scaled.median;
    const double m1 = r.summaries[1].L1_scaled.median;
    const double ratio = m1 / m0;
    ok = ok && ratio >= kRatioLow && ratio <= kRatioHigh;
    detail += fmt("%s medians %.4f,%.4f ratio=%.3f", c.name, m0, m1, ratio);
    // Tail fractions are reported only.
    for (std::size_t i = 0; i < c.n.size(); ++i) {
      std::vector<int> l1;
      for (const ResultRow& row : r.rows) {
        if (row.point.n == c.n[i]) l1.push_back(row.L1);
      }
      for (double A : {4.0, 100.0}) {
        const ProportionCheck t = tail_check(l1, c.n[i], A);
        detail += fmt(" tail[n=%d,A=%g]=%ld/%ld", c.n[i], A, t.estimate.successes, t.estimate.trials);
      }
    }
    detail += "; ";
  }
  const double elapsed = seconds_since(start);
  detail += fmt("runtime=%.1fs", elapsed);
  return {ok && elapsed < kC7Seconds, detail};
}

Verdict corollary_scaling() {
  const auto start = std::chrono::steady_clock::now();
  const ExperimentResult r = study({10000, 100000}, 3, kCorollaryReplicates, kSeed + 8, true, true, kC8ExactCap);
  const double d0 = r.summaries[0].diam_scaled.median, d1 = r.summaries[1].diam_scaled.median;
  const double t0 = r.summaries[0].tmix_scaled.median, t1 = r.summaries[1].tmix_scaled.median;
  const double diam_ratio = d1 / d0, mix_ratio = t1 / t0;
  int estimated = 0, largest = 0;
  for (const ResultRow& row : r.rows) {
    estimated += (row.t_mix_exact && !*row.t_mix_exact) ? 1 : 0;
    if (row.point.n == 100000) largest = std::max(largest, row.L1);
  }
  const double elapsed = seconds_since(start);
  const bool ok = diam_ratio >= kRatioLow && diam_ratio <= kRatioHigh && mix_ratio >= kMixRatioLow &&
                  mix_ratio <= kMixRatioHigh && elapsed < kC8Seconds;
  return {ok, fmt("diam medians %.4f,%.4f ratio=%.3f; tmix medians %.4f,%.4f ratio=%.3f; estimated=%d/%zu "
                  "max L1(n=1e5)=%d runtime=%.1fs",
                  d0, d1, diam_ratio, t0, t1, mix_ratio, estimated, r.rows.size(), largest, elapsed)};
}

Verdict phase_statistics_check() {
  const auto start = std::chrono::steady_clock::now();
  const PhaseReport report = phase_statistics(kBigN, 3, 0.0, kPhaseA, kPhaseReplicates, kSeed + 9, threads());
  const ProportionCheck tau1 = check_proportion("tau1_at_T1", report.checks[0].estimate.successes,
                                                report.checks[0].estimate.trials, kTau1Bound);
  const ProportionCheck not_E = check_proportion("not_E", report.checks[1].estimate.successes,
                                                 report.checks[1].estimate.trials, kNotEBound);
  return {tau1.pass && not_E.pass,
          fmt("P[tau1=T1]=%ld/%ld (upper %.4f <= %.2f) P[not E]=%ld/%ld (upper %.4f <= %.2f) runtime=%.1fs",
              tau1.estimate.successes, tau1.estimate.trials, tau1.estimate.wilson_high, kTau1Bound,
              not_E.estimate.successes, not_E.estimate.trials, not_E.estimate.wilson_high, kNotEBound,
              seconds_since(start))};
}

Verdict determinism() {
  std::vector<ExperimentConfig> configs(2);
  configs[0].n_values = {10000, 20000};
  configs[0].d_values = {3, 10, kCompleteDegree};
  configs[0].lambda_values = {-1.0, 0.0};
  configs[0].replicates = 6;
  configs[0].diameter = true;
  configs[0].mixing = true;
  configs[1].n_values = {100000};
  configs[1].d_values = {3};
  configs[1].lambda_values = {0.0};
  configs[1].replicates = 8;
  configs[1].phase = true;
  configs[1].A = 100.0;
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    ExperimentConfig c = configs[k];
    c.seed = kSeed + 10 + k;
    std::string reference;
    for (int t : {1, 4, 16}) {
      c.threads = t;
      const ExperimentResult r = scaling_study(c);
      std::ostringstream s;
      write_rows_jsonl(s, r.rows);
      write_rows_csv(s, r.rows);
      if (reference.empty()) reference = s.str();
      const bool same = s.str() == reference;
      ok = ok && same && !r.rows.empty();
      detail += fmt("config%zu threads=%d rows=%zu %s; ", k, t, r.rows.size(), same ? "identical" : "DIFFERENT");
    }
  }
  return {ok, detail};
}

bool report(const char* id, const char* name, const std::function<Verdict()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s %s %s: %s [%.1fs]\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
  return v.pass;
}

}  // namespace

int main() {
  std::printf("acceptance seed=%llu threads=%d\n", static_cast<unsigned long long>(kSeed), threads());
  bool all = true;
  all &= report("C1", "sampler uniformity", sampler_uniformity);
  all &= report("C2", "K4 trajectory", k4_trajectory);
  all &= report("C3", "lazy exposure vs eager percolation", lazy_matches_eager);
  all &= report("C4", "switching counts", switching_counts);
  BigTrajectories big;
  bool have_big = true;
  try {
    big = big_trajectories();
  } catch (const std::exception& e) {
    std::printf("trajectory generation failed: %s\n", e.what());
    have_big = false;
  }
  all &= report("C5", "frontier moments", [&] {
    return have_big ? frontier_moments(big) : Verdict{false, "no trajectories"};
  });
  all &= report("C6", "growth windows", [&] {
    return have_big ? growth_lemma(big) : Verdict{false, "no trajectories"};
  });
  all &= report("C7", "largest-component scaling", scaling_collapse);
  all &= report("C8", "diameter and mixing scaling", corollary_scaling);
  all &= report("C9", "phase statistics", phase_statistics_check);
  all &= report("C10", "determinism across workers", determinism);
  std::printf("acceptance %s\n", all ? "PASS" : "FAIL");
  return all ? 0 : 1;
}
