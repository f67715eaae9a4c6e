#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <utility>

namespace critperc {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Mixes a master seed with a path of coordinates into an independent stream
// seed. Order matters: (s, {1, 2}) and (s, {2, 1}) differ.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(master ^ 0x5851f42d4c957f2dULL);
  for (std::uint64_t part : path) {
    h = splitmix64(h ^ splitmix64(part + 0x14057b7ef767814fULL));
  }
  return h;
}

// Independent per-replicate streams keyed by (master, n, d, replicate).
enum class Stream : std::uint64_t { Graph = 1, Input = 2, Percolation = 3, Choice = 4 };

constexpr std::uint64_t replicate_seed(std::uint64_t master, long long n, int d, long long replicate,
                                       Stream stream) {
  return derive_seed(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d),
                              static_cast<std::uint64_t>(replicate),
                              static_cast<std::uint64_t>(stream)});
}

constexpr std::uint64_t edge_key(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

// Percolation indicator I(uv) as a pure function of (key, canonical edge).
// Eager percolation and lazy exposure share this, so both reveal the same
// realisation. Thresholds are coupled: retained at p implies retained at any
// p' >= p.
class EdgeIndicator {
 public:
  EdgeIndicator(std::uint64_t key, double p) : key_(key), p_(p) {}

  double uniform(int u, int v) const {
    return static_cast<double>(splitmix64(key_ ^ splitmix64(edge_key(u, v))) >> 11) *
           0x1.0p-53;
  }
  bool operator()(int u, int v) const { return uniform(u, v) < p_; }

  std::uint64_t key() const { return key_; }
  double p() const { return p_; }

 private:
  std::uint64_t key_;
  double p_;
};

}  // namespace critperc
