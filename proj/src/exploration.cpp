#include "critperc/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "critperc/error.hpp"

namespace critperc {

Input make_input(RegularGraph g, Rng& rng) {
  const int n = g.n();
  const int d = g.d();
  Input input{std::move(g), std::vector<int>(static_cast<std::size_t>(n) * d)};
  for (int v = 0; v < n; ++v) {
    auto first = input.perms.begin() + static_cast<std::ptrdiff_t>(v) * d;
    std::iota(first, first + d, 1);
    std::shuffle(first, first + d, rng);
  }
  return input;
}

Input make_identity_input(RegularGraph g) {
  const int n = g.n();
  const int d = g.d();
  Input input{std::move(g), std::vector<int>(static_cast<std::size_t>(n) * d)};
  for (int v = 0; v < n; ++v) {
    auto first = input.perms.begin() + static_cast<std::ptrdiff_t>(v) * d;
    std::iota(first, first + d, 1);
  }
  return input;
}

int ExposureState::S_size() const {
  return static_cast<int>(std::count(in_S.begin(), in_S.end(), 1));
}

Explorer::Explorer(const Input& input, const EdgeIndicator& indicator)
    : input_(input), g_(input.graph), indicator_(indicator), n_(input.graph.n()),
      d_(input.graph.d()), comp_(n_, -1), free_(n_, 0), dF_(n_, 0),
      failed_slot_(static_cast<std::size_t>(n_) * d_, 0), fresh_buckets_(d_ + 1) {
  if (input.perms.size() != static_cast<std::size_t>(n_) * d_) {
    throw PreconditionError("input permutations do not match the graph");
  }
  order_.reserve(static_cast<std::size_t>(n_));
}

int Explorer::active_vertex() {
  while (!active_.empty() && free_[active_.top()] == 0) active_.pop();
  if (active_.empty()) throw InvariantError("positive frontier without an active vertex");
  return active_.top();
}

// d_F only grows for unexplored vertices, so bucket 0 drains monotonically
// and a cursor finds its smallest member; higher buckets are lazy min-heaps.
int Explorer::pick_fresh_vertex() {
  while (fresh_cursor_ < n_ && (comp_[fresh_cursor_] >= 0 || dF_[fresh_cursor_] != 0)) {
    ++fresh_cursor_;
  }
  if (fresh_cursor_ < n_) return fresh_cursor_;
  for (int k = 1; k <= d_; ++k) {
    MinHeap& bucket = fresh_buckets_[k];
    while (!bucket.empty() && (comp_[bucket.top()] >= 0 || dF_[bucket.top()] != k)) bucket.pop();
    if (!bucket.empty()) return bucket.top();
  }
  throw InvariantError("no unexplored vertex left for a fresh start");
}

void Explorer::add_vertex(int w, int component) {
  auto row = g_.neighbors(w);
  int s_neighbors = 0;
  for (int j = 0; j < d_; ++j) {
    const int s = row[j];
    if (comp_[s] < 0) continue;
    ++s_neighbors;
    if (failed_slot_[slot(w, j)]) {
      failed_slot_[slot(w, j)] = 0;
      failed_slot_[slot(s, g_.neighbor_index(s, w))] = 0;
      --dF_[s];
      --dF_[w];
      --F_count_;
    } else {
      --free_[s];
    }
  }
  comp_[w] = component;
  free_[w] = d_ - s_neighbors;
  ++S_count_;
  order_.push_back(w);
  if (free_[w] > 0) active_.push(w);
}

StepRecord Explorer::step() {
  StepRecord rec;
  if (X_ > 0) {
    const int v = active_vertex();
    auto row = g_.neighbors(v);
    int best_rank = -1;
    int best_sigma = std::numeric_limits<int>::max();
    for (int i = 0; i < d_; ++i) {
      if (comp_[row[i]] >= 0 || failed_slot_[slot(v, i)]) continue;
      const int s = input_.sigma(v, i);
      if (s < best_sigma) {
        best_sigma = s;
        best_rank = i;
      }
    }
    if (best_rank < 0) throw InvariantError("active vertex has no unexposed edge");
    const int w = row[best_rank];
    rec.v = v;
    rec.w = w;
    if (indicator_(v, w)) {
      rec.indicator = 1;
      rec.Y = dF_[w];
      int s_neighbors = 0;
      for (int s : g_.neighbors(w)) s_neighbors += comp_[s] >= 0 ? 1 : 0;
      rec.Z = s_neighbors - rec.Y - 1;
      add_vertex(w, comp_[v]);
      rec.eta = d_ - 2 - rec.Y - 2 * rec.Z;
      ++c_;
    } else {
      rec.indicator = 0;
      failed_slot_[slot(v, best_rank)] = 1;
      failed_slot_[slot(w, g_.neighbor_index(w, v))] = 1;
      ++dF_[v];
      ++dF_[w];
      ++F_count_;
      --free_[v];
      fresh_buckets_[dF_[w]].push(w);
      rec.eta = -1;
    }
    rec.component = comp_[v];
  } else {
    if (S_count_ == n_) throw ExhaustedError("exploration exhausted: every vertex is explored");
    const int w = pick_fresh_vertex();
    rec.fresh = true;
    rec.w = w;
    rec.Y = dF_[w];
    add_vertex(w, component_count_++);
    rec.eta = d_ - rec.Y;
    rec.component = comp_[w];
    ++a_;
  }
  X_ += rec.eta;
  ++t_;
  rec.t = t_;
  rec.X = X_;
  rec.S_size = S_count_;
  rec.starters = a_;
  rec.grown = c_;
  return rec;
}

std::vector<Edge> Explorer::failed_edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(F_count_));
  for (int u : order_) {
    auto row = g_.neighbors(u);
    for (int i = 0; i < d_; ++i) {
      if (failed_slot_[slot(u, i)]) out.push_back(canonical(u, row[i]));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

ExposureState Explorer::snapshot() const {
  ExposureState state;
  state.in_S.assign(n_, 0);
  for (int u : order_) state.in_S[u] = 1;
  state.failed = failed_edges();
  return state;
}

long Explorer::recompute_frontier() const {
  long total = 0;
  for (int u : order_) {
    int internal = 0;
    for (int s : g_.neighbors(u)) internal += comp_[s] >= 0 ? 1 : 0;
    int failed = 0;
    for (int i = 0; i < d_; ++i) failed += failed_slot_[slot(u, i)];
    total += d_ - internal - failed;
  }
  return total;
}

void Explorer::check_invariants() const {
  const long recount = recompute_frontier();
  if (recount != X_) {
    throw InvariantError("frontier mismatch at t=" + std::to_string(t_) + ": incremental " +
                         std::to_string(X_) + ", recount " + std::to_string(recount));
  }
  if (F_count_ > t_) throw InvariantError("|E(F_t)| exceeds t");
  if (S_count_ != a_ + c_) throw InvariantError("|S_t| != a_t + c_t");
  long failed_slots = 0;
  for (std::uint8_t f : failed_slot_) failed_slots += f;
  if (failed_slots != 2 * F_count_) throw InvariantError("failed-edge count mismatch");
}

int Trajectory::S_at(long t) const {
  if (t <= 0 || steps.empty()) return 0;
  return steps[static_cast<std::size_t>(std::min<long>(t, static_cast<long>(steps.size()))) - 1].S_size;
}

int Trajectory::starters_at(long t) const {
  if (t <= 0 || steps.empty()) return 0;
  return steps[static_cast<std::size_t>(std::min<long>(t, static_cast<long>(steps.size()))) - 1].starters;
}

int Trajectory::grown_at(long t) const {
  if (t <= 0 || steps.empty()) return 0;
  return steps[static_cast<std::size_t>(std::min<long>(t, static_cast<long>(steps.size()))) - 1].grown;
}

long Trajectory::X_at(long t) const {
  if (t <= 0 || steps.empty()) return 0;
  return steps[static_cast<std::size_t>(std::min<long>(t, static_cast<long>(steps.size()))) - 1].X;
}

Trajectory run(const Input& input, const EdgeIndicator& indicator, const RunOptions& options) {
  if (options.t_max < 0) throw PreconditionError("t_max must be non-negative");
  Trajectory traj;
  traj.n = input.graph.n();
  traj.d = input.graph.d();
  traj.p = indicator.p();
  traj.percolation_key = indicator.key();
  traj.steps.reserve(static_cast<std::size_t>(
      std::min<long>(options.t_max, 4L * input.graph.n() + 16)));
  Explorer explorer(input, indicator);
  const long interval = std::max(1L, options.check_interval);
  while (explorer.t() < options.t_max && !explorer.exhausted()) {
    traj.steps.push_back(explorer.step());
    if (explorer.t() % interval == 0) explorer.check_invariants();
  }
  explorer.check_invariants();
  traj.exhausted = explorer.exhausted();
  if (options.keep_components) traj.components = explorer.components();
  return traj;
}

PhaseParameters phase_parameters(int n, int d, double mu, double A) {
  if (d < 3 || d > n - 1) throw PreconditionError("phase experiment needs 3 <= d <= n-1");
  if (!(A > 0.0)) throw PreconditionError("A must be positive");
  if (mu < 0.0) throw PreconditionError("mu must be non-negative");
  PhaseParameters params;
  params.n = n;
  params.d = d;
  params.A = A;
  const double n13 = std::cbrt(static_cast<double>(n));
  const double n23 = n13 * n13;
  params.mu = std::min(mu, n13);
  params.p = std::clamp((1.0 - params.mu / n13) / (d - 1), 0.0, 1.0);
  params.h = std::pow(A, -0.25) * d * n13;
  params.T1 = 5.0 * d * n23 / 6.0;
  params.T2 = 2.0 * d * n23 / A;
  // n^{2/3} is computed in floating point; the tolerance keeps exact
  // integers such as 25000 from rounding down.
  params.T1_steps = static_cast<long>(std::floor(params.T1 + 1e-9));
  params.T2_steps = static_cast<long>(std::floor(params.T2 + 1e-9));
  params.S1_threshold = 3.0 * n23;
  params.S2_threshold = 2.0 * n23;
  return params;
}

PhaseOutcome two_phase_experiment(const Input& input, double mu, double A,
                                  std::uint64_t percolation_key) {
  PhaseOutcome out;
  out.params = phase_parameters(input.graph.n(), input.graph.d(), mu, A);
  out.percolation_key = percolation_key;
  const PhaseParameters& pp = out.params;
  Explorer explorer(input, EdgeIndicator(percolation_key, pp.p));

  // First phase: stop at tau_h = min{t : X_t >= h} ^ T1.
  for (;;) {
    const long t = explorer.t();
    if (!out.tau_S1 && explorer.S_size() >= pp.S1_threshold) out.tau_S1 = t;
    if (static_cast<double>(explorer.X()) >= pp.h) {
      out.tau_h = t;
      break;
    }
    if (t >= pp.T1_steps || explorer.exhausted()) {
      out.tau_h = pp.T1_steps;
      break;
    }
    explorer.step();
  }
  out.tau_1 = out.tau_S1 ? std::min(out.tau_h, *out.tau_S1) : out.tau_h;
  out.E_holds = out.tau_h < pp.T1_steps && !(out.tau_S1 && *out.tau_S1 <= out.tau_h);
  if (!out.E_holds) return out;

  // Second phase, started from tau_h.
  out.X_at_tau_h = explorer.X();
  const int S_start = explorer.S_size();
  const std::size_t order_start = explorer.explored_order().size();
  auto W = [&](long x) { return pp.h - std::min(pp.h, static_cast<double>(x)); };
  out.W_max = W(explorer.X());
  long elapsed = 0;
  for (;;) {
    const long gain = explorer.S_size() - S_start;
    if (explorer.X() == 0 && !out.tau_0) out.tau_0 = elapsed;
    if (gain >= pp.S2_threshold && !out.tau_S2) out.tau_S2 = elapsed;
    if (elapsed >= pp.T2_steps && !out.tau_0) out.tau_0 = pp.T2_steps;
    if (out.tau_0 || out.tau_S2) break;
    explorer.step();
    ++elapsed;
    out.W_max = std::max(out.W_max, W(explorer.X()));
  }
  // The loop stops at the first of the two stopping times.
  out.tau_2 = elapsed;
  out.S_gain = explorer.S_size() - S_start;
  out.W_final = W(explorer.X());
  const auto& order = explorer.explored_order();
  out.second_phase_vertices.assign(order.begin() + static_cast<std::ptrdiff_t>(order_start), order.end());
  return out;
}

namespace {

bool keep_step(const StepRecord& rec, const TrajectoryDumpOptions& options, std::size_t index,
               std::size_t total) {
  if (rec.fresh || index + 1 == total) return true;
  if (options.every <= 1 || rec.t % options.every == 0) return true;
  return std::find(options.landmarks.begin(), options.landmarks.end(), rec.t) !=
         options.landmarks.end();
}

nlohmann::json step_json(const StepRecord& rec) {
  nlohmann::json row;
  row["t"] = rec.t;
  row["v"] = rec.v < 0 ? nlohmann::json(nullptr) : nlohmann::json(rec.v);
  row["w"] = rec.w;
  row["I"] = rec.indicator < 0 ? nlohmann::json(nullptr) : nlohmann::json(static_cast<int>(rec.indicator));
  row["Y"] = rec.Y;
  row["Z"] = rec.Z;
  row["eta"] = rec.eta;
  row["X"] = rec.X;
  row["S"] = rec.S_size;
  row["fresh"] = rec.fresh;
  row["component"] = rec.component;
  row["a"] = rec.starters;
  row["c"] = rec.grown;
  return row;
}

}  // namespace

void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj, const std::string& header_json,
                            const TrajectoryDumpOptions& options) {
  nlohmann::json header = header_json.empty() ? nlohmann::json::object()
                                              : nlohmann::json::parse(header_json);
  header["n"] = traj.n;
  header["d"] = traj.d;
  header["p"] = traj.p;
  header["steps"] = traj.steps.size();
  header["exhausted"] = traj.exhausted;
  out << nlohmann::json{{"header", header}}.dump() << '\n';
  out << nlohmann::json{{"t", 0}, {"X", 0}, {"S", 0}, {"a", 0}, {"c", 0}}.dump() << '\n';
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    if (keep_step(traj.steps[i], options, i, traj.steps.size())) {
      out << step_json(traj.steps[i]).dump() << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const TrajectoryDumpOptions& options) {
  out << "t,v,w,I,Y,Z,eta,X,S,fresh,component,a,c\n";
  out << "0,,,,,,,0,0,,,0,0\n";
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const StepRecord& r = traj.steps[i];
    if (!keep_step(r, options, i, traj.steps.size())) continue;
    out << r.t << ',';
    if (r.v >= 0) out << r.v;
    out << ',' << r.w << ',';
    if (r.indicator >= 0) out << static_cast<int>(r.indicator);
    out << ',' << r.Y << ',' << r.Z << ',' << r.eta << ',' << r.X << ',' << r.S_size << ','
        << (r.fresh ? 1 : 0) << ',' << r.component << ',' << r.starters << ',' << r.grown << '\n';
  }
}

}  // namespace critperc
