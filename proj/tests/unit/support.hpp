#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "critperc/graph.hpp"

namespace testing {

inline critperc::RegularGraph cycle(int n) {
  std::vector<critperc::Edge> edges;
  for (int v = 0; v < n; ++v) edges.push_back(critperc::canonical(v, (v + 1) % n));
  return critperc::RegularGraph(n, 2, edges);
}

// Partition of {0..n-1} induced by a labelling, as a set of sorted blocks.
inline std::set<std::vector<int>> partition(const std::vector<int>& label) {
  std::vector<std::vector<int>> blocks;
  std::vector<int> index(label.size(), -1);
  std::vector<int> ids;
  for (int v = 0; v < static_cast<int>(label.size()); ++v) {
    if (label[v] < 0) continue;
    auto it = std::find(ids.begin(), ids.end(), label[v]);
    if (it == ids.end()) {
      ids.push_back(label[v]);
      blocks.push_back({v});
    } else {
      blocks[it - ids.begin()].push_back(v);
    }
  }
  return {blocks.begin(), blocks.end()};
}

// Component labels from an edge list by plain depth-first search.
inline std::vector<int> components_by_search(int n, const std::vector<critperc::Edge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> label(n, -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    std::vector<int> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (int y : adj[x]) {
        if (label[y] < 0) {
          label[y] = next;
          stack.push_back(y);
        }
      }
    }
    ++next;
  }
  return label;
}

// All labelled simple d-regular graphs on n vertices, by trying every
// subset of the pairs of size nd/2. Only for tiny n.
inline std::vector<std::vector<critperc::Edge>> brute_force_regular(int n, int d) {
  std::vector<critperc::Edge> pairs;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
  }
  const int m = n * d / 2;
  std::vector<std::vector<critperc::Edge>> out;
  std::vector<int> pick(pairs.size(), 0);
  std::fill(pick.end() - m, pick.end(), 1);
  do {
    std::vector<int> deg(n, 0);
    std::vector<critperc::Edge> chosen;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (pick[i]) {
        ++deg[pairs[i].u];
        ++deg[pairs[i].v];
        chosen.push_back(pairs[i]);
      }
    }
    if (std::all_of(deg.begin(), deg.end(), [&](int x) { return x == d; })) out.push_back(chosen);
  } while (std::next_permutation(pick.begin(), pick.end()));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testing
