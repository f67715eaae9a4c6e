#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "critperc/graph.hpp"
#include "critperc/percolation.hpp"

namespace critperc {

// Connected (or claimed-connected) subgraph with local vertex ids 0..m-1 in
// compressed adjacency form.
class ComponentGraph {
 public:
  ComponentGraph() = default;
  // `edges` use local ids; `global_ids` maps local to original vertex ids
  // (identity when empty).
  ComponentGraph(int size, std::span<const Edge> edges, std::vector<int> global_ids = {});

  int size() const { return size_; }
  std::size_t edge_count() const { return targets_.size() / 2; }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }
  std::span<const int> neighbors(int v) const {
    return {targets_.data() + offsets_[v], static_cast<std::size_t>(degree(v))};
  }
  const std::vector<int>& global_ids() const { return global_ids_; }

 private:
  int size_ = 0;
  std::vector<int> offsets_{0};
  std::vector<int> targets_;
  std::vector<int> global_ids_;
};

ComponentGraph component_subgraph(const PercolationOutcome& outcome, int component_id);
ComponentGraph from_regular_graph(const RegularGraph& g);

struct ComponentSummary {
  int size = 0;
  std::size_t edge_count = 0;
  std::optional<int> diameter;
  std::optional<long> t_mix;  // empty when not measured ("capped")
  bool is_exact_mixing = false;
};

// Top-k component sizes, descending; only size is filled in.
std::vector<ComponentSummary> largest_components(const PercolationOutcome& outcome, int k);

// Exact diameter by BFS from every vertex. Throws DisconnectedError.
int diameter(const ComponentGraph& component);

enum class MixingMethod { Trivial, SparseAllStarts, Spectral, SparseEstimate };

struct MixingOptions {
  double eps = 0.25;
  int exact_cap = 5000;
  // Components up to this size iterate all start distributions directly;
  // larger exact ones go through the spectral decomposition.
  int sparse_limit = 64;
  int estimate_starts = 32;
};

struct MixingResult {
  long t_mix = 0;
  bool is_exact = true;
  MixingMethod method = MixingMethod::Trivial;
};

// Lazy random walk (hold 1/2, else uniform neighbour); smallest t with
// max_x TV(P^t(x, .), pi) <= eps, pi(v) = deg(v) / (2 |E|). Above exact_cap
// only `estimate_starts` deterministic starts are used and the result is a
// lower bound flagged is_exact = false. Throws DisconnectedError.
MixingResult mixing_time(const ComponentGraph& component, const MixingOptions& options = {});

// Direct iteration of start distributions; every vertex when `starts` is empty.
long mixing_time_sparse(const ComponentGraph& component, double eps, std::span<const int> starts = {});

// Eigendecomposition of the symmetrised lazy walk, with exact TV rows
// evaluated for every start whose L2 bound does not already settle it.
long mixing_time_spectral(const ComponentGraph& component, double eps);

// Tolerance added to eps in TV comparisons.
inline constexpr double kTvSlack = 1e-12;

}  // namespace critperc
