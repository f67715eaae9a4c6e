#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "critperc/graph.hpp"
#include "critperc/rng.hpp"

namespace critperc {

// Uniform perfect matching on n*d semi-edge points, projected to a multigraph.
Multigraph sample_pairing(int n, int d, Rng& rng);

// Exactly uniform over simple d-regular graphs: pairings are drawn until one
// is simple. A pairing is abandoned at its first loop or repeated edge, which
// leaves the conditional law unchanged. d == n-1 returns K_n directly.
RegularGraph sample_uniform_rejection(int n, int d, Rng& rng, long long max_attempts);

// Deterministic circulant d-regular graph (offsets 1..d/2, plus n/2 when d
// is odd).
RegularGraph circulant_graph(int n, int d);

struct ChainStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
};

enum class ChainStart { Circulant, RepairedPairing };

// Switching Markov chain. Each proposal picks an ordered pair of edges and a
// pairing of their endpoints uniformly; invalid proposals leave the graph
// unchanged. `burn_in` counts proposals, which makes the chain symmetric and
// its stationary law uniform.
RegularGraph sample_switching_chain(int n, int d, Rng& rng, std::uint64_t burn_in,
                                    ChainStart start = ChainStart::Circulant,
                                    ChainStats* stats = nullptr);

// Pairing-model draw whose loops and repeated edges are removed by random
// switchings against uniformly chosen edges. Approximately uniform; used as
// a chain start when rejection is infeasible.
RegularGraph sample_repaired_pairing(int n, int d, Rng& rng, std::uint64_t* repairs = nullptr);

// Backtracking edge extension: every labelled simple d-regular graph on n
// vertices, exactly once, sorted by canonical edge list. Empty when n*d is
// odd. Throws CapExceededError when n > cap (unless d == n-1).
std::vector<RegularGraph> enumerate_regular(int n, int d, int cap = 8);

// Independent oracle: enumerates pairings of the n*d points (pruning any
// partial pairing with a loop or repeated edge), projects and deduplicates.
// `pairings_per_graph`, when given, receives the number of simple pairings
// behind each graph, which must equal (d!)^n.
std::vector<RegularGraph> enumerate_regular_by_pairings(
    int n, int d, int max_points = 20, std::vector<long long>* pairings_per_graph = nullptr);

struct SimpleProbabilityEstimate {
  long long trials = 0;
  long long simple = 0;
  double fraction = 0.0;
  double half_width = 0.0;  // normal-approximation 95% half-width
};

SimpleProbabilityEstimate estimate_simple_probability(int n, int d, long long trials, Rng& rng);

enum class SamplerKind { Auto, Rejection, SwitchingChain, RepairedChain, Complete };

std::string_view to_string(SamplerKind kind);
SamplerKind parse_sampler_kind(std::string_view name);

struct SamplerPolicy {
  SamplerKind kind = SamplerKind::Auto;
  // Rejection is chosen when exp(-(d^2-1)/4) is at least this.
  double min_acceptance = 1e-4;
  long long max_attempts = 100000;
  // Proposal count for chain samplers; default 50*n*d.
  std::optional<std::uint64_t> burn_in;
  // Auto uses the circulant-start chain while 50*n*d stays within this many
  // proposals, and a repaired-pairing start otherwise.
  std::uint64_t chain_budget = 20'000'000;
  // Burn-in after a repaired-pairing start; default min(n*d/2, repaired_budget).
  std::optional<std::uint64_t> repaired_burn_in;
  std::uint64_t repaired_budget = 200'000;
};

double rejection_acceptance_estimate(int d);

struct SampledGraph {
  RegularGraph graph;
  SamplerKind used;
  std::uint64_t attempts_or_moves = 0;
};

// Applies the selection policy. Under Auto, exhausted rejection falls back to
// the switching chain, and `used` records the sampler that produced the graph.
SampledGraph sample_regular(int n, int d, Rng& rng, const SamplerPolicy& policy = {});

SamplerKind resolve_sampler(int n, int d, const SamplerPolicy& policy);

}  // namespace critperc
