#include "critperc/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <queue>

#include <cblas.h>
#include <lapacke.h>

#include "blas_guard.hpp"
#include "critperc/error.hpp"
#include "critperc/rng.hpp"

namespace critperc {

ComponentGraph::ComponentGraph(int size, std::span<const Edge> edges, std::vector<int> global_ids)
    : size_(size), global_ids_(std::move(global_ids)) {
  if (size < 0) throw PreconditionError("negative component size");
  if (!global_ids_.empty() && static_cast<int>(global_ids_.size()) != size) {
    throw PreconditionError("global id map does not match component size");
  }
  std::vector<int> deg(size, 0);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= size || e.v >= size) {
      throw PreconditionError("component edge endpoint out of range");
    }
    if (e.u == e.v) throw PreconditionError("component edge is a loop");
    ++deg[e.u];
    ++deg[e.v];
  }
  offsets_.assign(size + 1, 0);
  for (int v = 0; v < size; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  targets_.resize(offsets_[size]);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges) {
    targets_[fill[e.u]++] = e.v;
    targets_[fill[e.v]++] = e.u;
  }
  for (int v = 0; v < size; ++v) {
    std::sort(targets_.begin() + offsets_[v], targets_.begin() + offsets_[v + 1]);
  }
}

ComponentGraph component_subgraph(const PercolationOutcome& outcome, int component_id) {
  if (component_id < 0 || component_id >= static_cast<int>(outcome.component_size_by_id.size())) {
    throw PreconditionError("component id out of range");
  }
  std::vector<int> local(outcome.n, -1);
  std::vector<int> global;
  global.reserve(outcome.component_size_by_id[component_id]);
  for (int v = 0; v < outcome.n; ++v) {
    if (outcome.component_id[v] == component_id) {
      local[v] = static_cast<int>(global.size());
      global.push_back(v);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : outcome.retained_edges) {
    if (local[e.u] >= 0) edges.push_back({local[e.u], local[e.v]});
  }
  const int size = static_cast<int>(global.size());
  return ComponentGraph(size, edges, std::move(global));
}

ComponentGraph from_regular_graph(const RegularGraph& g) {
  return ComponentGraph(g.n(), g.edges());
}

std::vector<ComponentSummary> largest_components(const PercolationOutcome& outcome, int k) {
  if (k < 0) throw PreconditionError("k must be non-negative");
  std::vector<ComponentSummary> out;
  for (int i = 0; i < k && i < static_cast<int>(outcome.component_sizes.size()); ++i) {
    ComponentSummary s;
    s.size = outcome.component_sizes[i];
    out.push_back(s);
  }
  return out;
}

int diameter(const ComponentGraph& c) {
  const int m = c.size();
  if (m == 0) throw PreconditionError("diameter of an empty graph");
  std::vector<int> dist(m);
  std::vector<int> queue(m);
  int best = 0;
  for (int s = 0; s < m; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    int head = 0, tail = 0;
    queue[tail++] = s;
    dist[s] = 0;
    while (head < tail) {
      int x = queue[head++];
      for (int y : c.neighbors(x)) {
        if (dist[y] < 0) {
          dist[y] = dist[x] + 1;
          queue[tail++] = y;
        }
      }
    }
    if (tail != m) throw DisconnectedError("diameter: component is not connected");
    best = std::max(best, dist[queue[tail - 1]]);
  }
  return best;
}

namespace {

bool connected(const ComponentGraph& c) {
  const int m = c.size();
  if (m == 0) return true;
  std::vector<char> seen(m, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (int y : c.neighbors(x)) {
      if (!seen[y]) {
        seen[y] = 1;
        ++count;
        stack.push_back(y);
      }
    }
  }
  return count == m;
}

void require_walkable(const ComponentGraph& c, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("eps must lie in (0, 1)");
  if (c.size() == 0) throw PreconditionError("mixing time of an empty graph");
  if (!connected(c)) throw DisconnectedError("mixing time: component is not connected");
}

// 0.5 * sum |a_i - b_i| with compensated summation.
double tv_distance(const double* a, const double* b, int m) {
  double sum = 0.0, comp = 0.0;
  for (int i = 0; i < m; ++i) {
    double term = std::abs(a[i] - b[i]) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return 0.5 * sum;
}

std::vector<double> stationary(const ComponentGraph& c) {
  const int m = c.size();
  std::vector<double> pi(m);
  const double total = 2.0 * static_cast<double>(c.edge_count());
  for (int v = 0; v < m; ++v) pi[v] = c.degree(v) / total;
  return pi;
}

constexpr long kMaxSteps = 200'000'000;
constexpr int kLanes = 8;

}  // namespace

// Up to kLanes starts are walked side by side, interleaved per vertex so the
// lanes vectorise; each lane does exactly the arithmetic of a lone walk, and a
// lane that mixes is refilled with the next start.
long mixing_time_sparse(const ComponentGraph& c, double eps, std::span<const int> starts) {
  require_walkable(c, eps);
  const int m = c.size();
  if (m == 1) return 0;
  const std::vector<double> pi = stationary(c);
  std::vector<int> all;
  if (starts.empty()) {
    all.resize(m);
    std::iota(all.begin(), all.end(), 0);
    starts = all;
  }
  for (int s : starts) {
    if (s < 0 || s >= m) throw PreconditionError("start vertex out of range");
  }
  constexpr int L = kLanes;
  const auto at = [](int v, int lane) { return static_cast<std::size_t>(v) * L + lane; };
  std::vector<double> cur(static_cast<std::size_t>(m) * L, 0.0), next(cur.size()), share(cur.size());
  std::array<long, L> t{};
  std::array<double, L> tv{};
  std::array<bool, L> active{};
  std::size_t next_start = 0;
  long worst = 0;
  // Starts a lane from a point mass, skipping starts that are already mixed.
  auto refill = [&](int lane) {
    active[lane] = false;
    while (next_start < starts.size()) {
      const int s = starts[next_start++];
      const double tv0 = 1.0 - pi[s];
      if (tv0 <= eps + kTvSlack) continue;
      for (int v = 0; v < m; ++v) cur[at(v, lane)] = 0.0;
      cur[at(s, lane)] = 1.0;
      t[lane] = 0;
      tv[lane] = tv0;
      active[lane] = true;
      return;
    }
  };
  for (int lane = 0; lane < L; ++lane) refill(lane);
  std::array<double, L> sum{}, comp{};
  while (std::any_of(active.begin(), active.end(), [](bool a) { return a; })) {
    for (int x = 0; x < m; ++x) {
      const double deg = c.degree(x);
      for (int lane = 0; lane < L; ++lane) share[at(x, lane)] = 0.5 * cur[at(x, lane)] / deg;
    }
    sum.fill(0.0);
    comp.fill(0.0);
    for (int y = 0; y < m; ++y) {
      std::array<double, L> acc;
      for (int lane = 0; lane < L; ++lane) acc[lane] = 0.5 * cur[at(y, lane)];
      for (int x : c.neighbors(y)) {
        for (int lane = 0; lane < L; ++lane) acc[lane] += share[at(x, lane)];
      }
      // Compensated TV sum, as in tv_distance.
      for (int lane = 0; lane < L; ++lane) {
        next[at(y, lane)] = acc[lane];
        const double term = std::abs(acc[lane] - pi[y]) - comp[lane];
        const double s2 = sum[lane] + term;
        comp[lane] = (s2 - sum[lane]) - term;
        sum[lane] = s2;
      }
    }
    cur.swap(next);
    for (int lane = 0; lane < L; ++lane) {
      if (!active[lane]) continue;
      ++t[lane];
      const double next_tv = 0.5 * sum[lane];
      if (next_tv > tv[lane] + 1e-12) throw InvariantError("total variation increased along the walk");
      tv[lane] = next_tv;
      if (t[lane] > kMaxSteps) throw InvariantError("walk did not mix within the step guard");
      if (tv[lane] <= eps + kTvSlack) {
        worst = std::max(worst, t[lane]);
        refill(lane);
      }
    }
  }
  return worst;
}

namespace {

// Symmetrised lazy walk M = (I + D^{-1/2} A D^{-1/2}) / 2 = U diag(lambda) U^T,
// so P^t(x, y) = sqrt(pi_y / pi_x) sum_k lambda_k^t U(x, k) U(y, k).
// Only times t > from are ever evaluated, so only the modes with
// lambda^from >= cut are kept. By Cauchy-Schwarz the dropped modes move TV
// from x by at most lambda^t / (2 sqrt(pi_x)) <= 1e-15.
class SpectralWalk {
 public:
  SpectralWalk(const ComponentGraph& c, double eps) : m_(c.size()), pi_(stationary(c)) {
    ensure_blas_kernels();
    sqrt_pi_.resize(m_);
    for (int y = 0; y < m_; ++y) sqrt_pi_[y] = std::sqrt(pi_[y]);
    const double cut = 2e-15 * *std::min_element(sqrt_pi_.begin(), sqrt_pi_.end());

    std::vector<double> a(static_cast<std::size_t>(m_) * m_, 0.0);
    std::vector<double> inv_sqrt_deg(m_);
    for (int v = 0; v < m_; ++v) inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(c.degree(v)));
    for (int x = 0; x < m_; ++x) {
      a[idx(x, x)] = 0.5;
      for (int y : c.neighbors(x)) a[idx(x, y)] = 0.5 * inv_sqrt_deg[x] * inv_sqrt_deg[y];
    }
    // dstemr uses the last off-diagonal slot as workspace.
    std::vector<double> diag(m_), off(m_, 0.0), tau(std::max(1, m_ - 1));
    check(LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'U', m_, a.data(), m_, diag.data(), off.data(), tau.data()));
    std::vector<double> all = diag, off_copy = off;
    check(LAPACKE_dsterf(m_, all.data(), off_copy.data()));
    if (std::abs(all[m_ - 1] - 1.0) > 1e-8) throw InvariantError("eigendecomposition failed its stationary check");

    // t_mix >= (t_rel - 1) log(1 / (2 eps)) for a reversible chain; the lazy
    // walk has no negative eigenvalues, so t_rel = 1 / (1 - lambda_2).
    const double gap = std::max(1.0 - all[m_ - 2], 1e-300);
    const double lower = (1.0 / gap - 1.0) * std::log(1.0 / (2.0 * eps)) * (1.0 - 1e-6);
    from_ = lower > 1.0 ? static_cast<long>(std::ceil(lower)) - 1 : 0;
    int kept = 1;
    while (kept < m_ && std::pow(std::max(all[m_ - 1 - kept], 0.0), static_cast<double>(from_)) >= cut) ++kept;
    if (from_ == 0) kept = m_;

    // dstemr needs room for n eigenvalues even when it returns fewer.
    lambda_.resize(m_);
    U_.assign(static_cast<std::size_t>(m_) * kept, 0.0);
    std::vector<lapack_int> support(2 * static_cast<std::size_t>(m_));
    lapack_int found = 0;
    lapack_logical tryrac = 1;
    check(LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', m_, diag.data(), off.data(), 0.0, 0.0, m_ - kept + 1, m_,
                         &found, lambda_.data(), U_.data(), m_, kept, support.data(), &tryrac));
    if (found != kept) throw InvariantError("eigendecomposition returned too few eigenpairs");
    check(LAPACKE_dormtr(LAPACK_COL_MAJOR, 'L', 'U', 'N', m_, kept, a.data(), m_, tau.data(), U_.data(), m_));
    kept_ = kept;
    lambda_.resize(kept_);

    // The top eigenvector must be +-sqrt(pi), and the kept vectors orthonormal.
    double overlap = 0.0;
    for (int x = 0; x < m_; ++x) overlap += U_[idx(x, kept_ - 1)] * sqrt_pi_[x];
    if (std::abs(lambda_[kept_ - 1] - 1.0) > 1e-8 || std::abs(std::abs(overlap) - 1.0) > 1e-8) {
      throw InvariantError("eigendecomposition failed its stationary check");
    }
    std::vector<double> gram(static_cast<std::size_t>(kept_) * kept_);
    cblas_dsyrk(CblasColMajor, CblasUpper, CblasTrans, kept_, m_, 1.0, U_.data(), m_, 0.0, gram.data(), kept_);
    for (int i = 0; i < kept_; ++i) {
      for (int j = i; j < kept_; ++j) {
        const double expected = i == j ? 1.0 : 0.0;
        if (std::abs(gram[i + static_cast<std::size_t>(j) * kept_] - expected) > 1e-8) {
          throw InvariantError("eigenvectors are not orthonormal");
        }
      }
    }
    for (double& l : lambda_) l = std::clamp(l, 0.0, 1.0);
  }

  int size() const { return m_; }
  // Every start is above eps at this time.
  long from() const { return from_; }

  // (1/2) ||P^t(x, .)/pi - 1||_{2, pi} over the kept modes, used only to
  // order starts.
  std::vector<double> l2_scores(long t) const {
    std::vector<double> out(m_, 0.0);
    for (int k = 0; k + 1 < kept_; ++k) {
      const double w = std::pow(lambda_[k], 2.0 * static_cast<double>(t));
      for (int x = 0; x < m_; ++x) out[x] += w * U_[idx(x, k)] * U_[idx(x, k)];
    }
    for (int x = 0; x < m_; ++x) out[x] = 0.5 * std::sqrt(out[x] / pi_[x]);
    return out;
  }

  // TV at time t > from() for a block of starts, through one matrix product.
  std::vector<double> tv_block(std::span<const int> starts, long t) const {
    const int b = static_cast<int>(starts.size());
    std::vector<double> powt(kept_);
    for (int k = 0; k < kept_; ++k) powt[k] = std::pow(lambda_[k], static_cast<double>(t));
    std::vector<double> left(static_cast<std::size_t>(b) * kept_);
    for (int i = 0; i < b; ++i) {
      for (int k = 0; k < kept_; ++k) {
        left[static_cast<std::size_t>(i) * kept_ + k] = U_[idx(starts[i], k)] * powt[k];
      }
    }
    std::vector<double> rows(static_cast<std::size_t>(b) * m_);
    // rows(i, y) = sum_k left(i, k) U(y, k); the column-major U buffer read
    // row-major is already U^T.
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, b, m_, kept_, 1.0, left.data(), kept_,
                U_.data(), m_, 0.0, rows.data(), m_);
    std::vector<double> out(b);
    for (int i = 0; i < b; ++i) {
      double* r = rows.data() + static_cast<std::size_t>(i) * m_;
      to_distribution(starts[i], r);
      out[i] = tv_distance(r, pi_.data(), m_);
    }
    return out;
  }

 private:
  static void check(lapack_int info) {
    if (info != 0) throw InvariantError("eigendecomposition failed");
  }
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row) + static_cast<std::size_t>(col) * m_;
  }
  void to_distribution(int x, double* row) const {
    const double inv = 1.0 / sqrt_pi_[x];
    for (int y = 0; y < m_; ++y) row[y] *= sqrt_pi_[y] * inv;
  }

  int m_;
  int kept_ = 0;
  long from_ = 0;
  std::vector<double> pi_;
  std::vector<double> sqrt_pi_;
  std::vector<double> U_;  // column-major, kept eigenvectors in ascending order
  std::vector<double> lambda_;
};

// Whether every start in `rows` has TV <= eps at t. Blocks are checked in
// order and the first failing block is moved to the front, so repeated calls
// during a search usually fail on their first product.
bool all_mixed(const SpectralWalk& walk, std::vector<int>& rows, long t, double eps) {
  const std::size_t block = 64;
  for (std::size_t begin = 0; begin < rows.size(); begin += block) {
    const std::size_t end = std::min(rows.size(), begin + block);
    std::span<const int> starts(rows.data() + begin, end - begin);
    const std::vector<double> tv = walk.tv_block(starts, t);
    for (double v : tv) {
      if (v > eps + kTvSlack) {
        std::rotate(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(begin),
                    rows.begin() + static_cast<std::ptrdiff_t>(end));
        return false;
      }
    }
  }
  return true;
}

// Smallest t > from at which every start in `rows` has TV <= eps. Each
// start's TV is non-increasing in t, so an exponential then binary search
// finds it.
long first_mixed_time(const SpectralWalk& walk, std::vector<int>& rows, long from, double eps) {
  long lo = from;
  long step = 1;
  long hi = from + step;
  while (!all_mixed(walk, rows, hi, eps)) {
    lo = hi;
    step *= 2;
    hi = from + step;
    if (hi > kMaxSteps) throw InvariantError("walk did not mix within the step guard");
  }
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    if (all_mixed(walk, rows, mid, eps)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace

// The worst start is above eps at walk.from(). A probe of the starts with the
// largest L2 scores fixes a candidate T > from; every start is then checked
// with an exact TV row at T, and one final search over the starts still above
// eps gives t_mix. Per-start TV is non-increasing in t, so starts mixed at T
// stay mixed and the final time is exact.
long mixing_time_spectral(const ComponentGraph& c, double eps) {
  require_walkable(c, eps);
  const int m = c.size();
  if (m == 1) return 0;
  const std::vector<double> pi = stationary(c);
  // At t = 0 the worst start is the one with the smallest stationary mass.
  if (1.0 - *std::min_element(pi.begin(), pi.end()) <= eps + kTvSlack) return 0;
  const SpectralWalk walk(c, eps);
  const long from = walk.from();
  const std::vector<double> score = walk.l2_scores(from);
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
  std::vector<int> probe(order.begin(), order.begin() + std::min(m, 64));
  const long T = first_mixed_time(walk, probe, from, eps);
  std::vector<int> unmixed;
  const std::size_t sweep = 256;
  for (std::size_t begin = 0; begin < order.size(); begin += sweep) {
    const std::size_t end = std::min(order.size(), begin + sweep);
    std::span<const int> starts(order.data() + begin, end - begin);
    const std::vector<double> tv = walk.tv_block(starts, T);
    for (std::size_t i = 0; i < starts.size(); ++i) {
      if (tv[i] > eps + kTvSlack) unmixed.push_back(starts[i]);
    }
  }
  if (unmixed.empty()) return T;
  return first_mixed_time(walk, unmixed, T, eps);
}

MixingResult mixing_time(const ComponentGraph& c, const MixingOptions& options) {
  require_walkable(c, options.eps);
  MixingResult out;
  const int m = c.size();
  if (m == 1) return out;
  if (m <= options.sparse_limit) {
    out.t_mix = mixing_time_sparse(c, options.eps);
    out.method = MixingMethod::SparseAllStarts;
    return out;
  }
  if (m <= options.exact_cap) {
    out.t_mix = mixing_time_spectral(c, options.eps);
    out.method = MixingMethod::Spectral;
    return out;
  }
  // Estimate: fixed pseudo-random starts, so the value is reproducible.
  Rng rng(derive_seed(0x6d6978696e67ULL, {static_cast<std::uint64_t>(m), c.edge_count()}));
  std::vector<int> starts(m);
  std::iota(starts.begin(), starts.end(), 0);
  const int k = std::min(options.estimate_starts, m);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, m - 1);
    std::swap(starts[i], starts[pick(rng)]);
  }
  starts.resize(k);
  out.t_mix = mixing_time_sparse(c, options.eps, starts);
  out.is_exact = false;
  out.method = MixingMethod::SparseEstimate;
  return out;
}

}  // namespace critperc
