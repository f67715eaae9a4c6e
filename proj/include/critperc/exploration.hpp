#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "critperc/graph.hpp"
#include "critperc/rng.hpp"

namespace critperc {

// A graph together with per-vertex permutations of the semi-edge labels.
// The i-th smallest neighbour of v carries label i+1 at v; sigma(v, i) is
// the permutation value of that label, in {1..d}.
struct Input {
  RegularGraph graph;
  std::vector<int> perms;

  int label(int /*v*/, int neighbor_rank) const { return neighbor_rank + 1; }
  int sigma(int v, int neighbor_rank) const {
    return perms[static_cast<std::size_t>(v) * graph.d() + neighbor_rank];
  }
};

// Independent uniform permutation per vertex.
Input make_input(RegularGraph g, Rng& rng);
// Identity permutations: the exploration then always follows the
// smallest-ranked unexposed neighbour.
Input make_identity_input(RegularGraph g);

// One transition; fields carry the subscript `t` (the time after the step).
struct StepRecord {
  long t = 0;
  int v = -1;  // active vertex; -1 when a new component starts
  int w = -1;
  std::int8_t indicator = -1;  // I(vw); -1 when absent (fresh step)
  int Y = 0;
  int Z = 0;
  int eta = 0;
  long X = 0;      // X_t
  int S_size = 0;  // |S_t|
  bool fresh = false;
  int component = -1;
  int starters = 0;  // a_t
  int grown = 0;     // c_t

  bool added() const { return fresh || indicator == 1; }
  long X_before() const { return X - eta; }
  int S_before() const { return S_size - (added() ? 1 : 0); }
};

// Snapshot of the exposure structures: S_t and the failed edges F_t.
// H_t is implicit as the induced subgraph on S_t.
struct ExposureState {
  std::vector<char> in_S;
  std::vector<Edge> failed;

  int S_size() const;
};

// Incremental exploration of an input under an edge-keyed percolation
// indicator. Holds a reference to the input, which must outlive it.
class Explorer {
 public:
  Explorer(const Input& input, const EdgeIndicator& indicator);

  // Throws ExhaustedError once S = V and X = 0.
  StepRecord step();

  bool exhausted() const { return X_ == 0 && S_count_ == n_; }
  long t() const { return t_; }
  long X() const { return X_; }
  int S_size() const { return S_count_; }
  int starters() const { return a_; }
  int grown() const { return c_; }
  long failed_count() const { return F_count_; }

  bool explored(int v) const { return comp_[v] >= 0; }
  int component_of(int v) const { return comp_[v]; }
  int failed_degree(int v) const { return dF_[v]; }
  const std::vector<int>& explored_order() const { return order_; }
  const std::vector<int>& components() const { return comp_; }

  std::vector<Edge> failed_edges() const;
  ExposureState snapshot() const;

  // X recomputed from its definition; the sum over S of (d - d_H - d_F).
  long recompute_frontier() const;
  // Throws InvariantError when the incremental state disagrees with a
  // from-scratch recount.
  void check_invariants() const;

 private:
  int pick_fresh_vertex();
  int active_vertex();
  void add_vertex(int w, int component);
  std::size_t slot(int v, int rank) const { return static_cast<std::size_t>(v) * d_ + rank; }

  using MinHeap = std::priority_queue<int, std::vector<int>, std::greater<int>>;

  const Input& input_;
  const RegularGraph& g_;
  EdgeIndicator indicator_;
  int n_;
  int d_;
  long t_ = 0;
  long X_ = 0;
  int S_count_ = 0;
  int a_ = 0;
  int c_ = 0;
  int component_count_ = 0;
  long F_count_ = 0;
  std::vector<int> comp_;
  std::vector<int> free_;
  std::vector<int> dF_;
  std::vector<std::uint8_t> failed_slot_;
  std::vector<int> order_;
  MinHeap active_;
  int fresh_cursor_ = 0;
  std::vector<MinHeap> fresh_buckets_;
};

struct Trajectory {
  int n = 0;
  int d = 0;
  double p = 0.0;
  std::uint64_t percolation_key = 0;
  std::vector<StepRecord> steps;
  bool exhausted = false;
  // Per-vertex explored component (-1 unexplored); filled only on request.
  std::vector<int> components;

  // |S_t|, a_t, c_t for 0 <= t <= steps.size(); constant after exhaustion.
  int S_at(long t) const;
  int starters_at(long t) const;
  int grown_at(long t) const;
  long X_at(long t) const;
};

struct RunOptions {
  long t_max = 0;
  long check_interval = 1L << 14;
  bool keep_components = false;
};

// Runs up to t_max steps, stopping early when exhausted. Deterministic in
// (input, indicator).
Trajectory run(const Input& input, const EdgeIndicator& indicator, const RunOptions& options);

struct PhaseParameters {
  int n = 0;
  int d = 0;
  double A = 0.0;
  double mu = 0.0;
  double p = 0.0;
  double h = 0.0;   // A^{-1/4} d n^{1/3}
  double T1 = 0.0;  // 5 d n^{2/3} / 6
  double T2 = 0.0;  // 2 A^{-1} d n^{2/3}
  long T1_steps = 0;
  long T2_steps = 0;
  double S1_threshold = 0.0;  // 3 n^{2/3}
  double S2_threshold = 0.0;  // 2 n^{2/3}
};

// mu is clamped so that p = (1 - mu n^{-1/3})/(d-1) stays in [0, 1].
PhaseParameters phase_parameters(int n, int d, double mu, double A);

struct PhaseOutcome {
  PhaseParameters params;
  long tau_h = 0;
  std::optional<long> tau_S1;  // empty when |S| stays below 3 n^{2/3} up to tau_h
  long tau_1 = 0;
  bool E_holds = false;
  // Second phase; present only when E holds.
  std::optional<long> tau_0;
  std::optional<long> tau_S2;
  std::optional<long> tau_2;
  long S_gain = 0;
  double W_max = 0.0;
  double W_final = 0.0;
  long X_at_tau_h = 0;
  std::vector<int> second_phase_vertices;
  std::uint64_t percolation_key = 0;
};

PhaseOutcome two_phase_experiment(const Input& input, double mu, double A,
                                  std::uint64_t percolation_key);

struct TrajectoryDumpOptions {
  long every = 1;
  std::vector<long> landmarks;
};

// Header object, a t = 0 state row, then one row per kept step (every k-th,
// all fresh steps, and listed landmark times).
void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj, const std::string& header_json,
                            const TrajectoryDumpOptions& options = {});
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const TrajectoryDumpOptions& options = {});

}  // namespace critperc
