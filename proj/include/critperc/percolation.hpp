#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "critperc/graph.hpp"
#include "critperc/rng.hpp"

namespace critperc {

// Bond percolation on a base graph together with its component structure.
// `retained` is aligned with the base graph's canonical edge list; it is empty
// when the base graph is the implicit complete graph (see percolate_complete).
struct PercolationOutcome {
  int n = 0;
  double p = 0.0;
  std::size_t base_edge_count = 0;
  std::vector<std::uint8_t> retained;
  std::vector<Edge> retained_edges;
  // Components are numbered in order of their smallest vertex.
  std::vector<int> component_id;
  // Sizes indexed by component id.
  std::vector<int> component_size_by_id;
  // Sizes in descending order.
  std::vector<int> component_sizes;

  int largest() const { return component_sizes.empty() ? 0 : component_sizes.front(); }
  int second_largest() const { return component_sizes.size() < 2 ? 0 : component_sizes[1]; }
  // Id of the (first, by smallest vertex) component of maximum size.
  int largest_component_id() const;
};

// Each edge is retained independently; I(uv) comes from the edge-keyed
// indicator, so a lazy exploration with the same indicator sees the same
// realisation.
PercolationOutcome percolate(const RegularGraph& g, const EdgeIndicator& indicator);

// Percolation of K_n without materialising its n(n-1)/2 edges.
PercolationOutcome percolate_complete(int n, const EdgeIndicator& indicator);

// Same law on K_n, drawn by geometric skips over the pairs in lexicographic
// order: O(n + retained) work instead of one hash per pair. The realisation
// is a function of (n, p, key) but not of any EdgeIndicator.
PercolationOutcome percolate_complete_skip(int n, double p, std::uint64_t key);

// (1 + lambda n^{-1/3}) / (d - 1), clamped above at 1. Throws when d < 2 or
// the unclamped value is negative.
double critical_p(int d, double lambda, long long n);

// JSON-lines row: retained edge list and component-size histogram.
void write_outcome_json(std::ostream& out, const PercolationOutcome& outcome,
                        bool include_edges = true);

}  // namespace critperc
