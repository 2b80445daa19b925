#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fpnet/error.hpp"

namespace fpnet {

/// Undirected simple graph as an edge list over nodes 0..nodes-1, i < j per edge.
struct Graph {
  int nodes = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<int> degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(nodes), 0);
    for (const auto& [i, j] : edges) {
      ++deg[static_cast<std::size_t>(i)];
      ++deg[static_cast<std::size_t>(j)];
    }
    return deg;
  }

  bool is_regular(int degree) const {
    const auto deg = degrees();
    return std::all_of(deg.begin(), deg.end(), [&](int d) { return d == degree; });
  }

  bool is_connected() const {
    if (nodes <= 1) return true;
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nodes));
    for (const auto& [i, j] : edges) {
      adj[static_cast<std::size_t>(i)].push_back(j);
      adj[static_cast<std::size_t>(j)].push_back(i);
    }
    std::vector<char> seen(static_cast<std::size_t>(nodes), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++reached;
          stack.push_back(w);
        }
      }
    }
    return reached == nodes;
  }
};

/// Circulant k-regular graph: node i links to i +- 1, ..., i +- k/2 (and to
/// its antipode when k is odd). A nonzero seed relabels the nodes with a
/// seeded permutation; seed 0 keeps the ring order.
inline Graph make_regular_graph(int n, int degree, std::uint64_t seed = 0) {
  if (n < 2 || degree < 1 || degree >= n) {
    throw ConfigError("make_regular_graph: need 1 <= degree < n, got n=" + std::to_string(n) +
                      ", degree=" + std::to_string(degree));
  }
  if ((n * degree) % 2 != 0) {
    throw ConfigError("make_regular_graph: n * degree must be even");
  }
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    std::shuffle(label.begin(), label.end(), rng);
  }
  std::set<std::pair<int, int>> unique;
  auto link = [&](int i, int j) {
    int a = label[static_cast<std::size_t>(i)];
    int b = label[static_cast<std::size_t>(j)];
    if (a > b) std::swap(a, b);
    unique.emplace(a, b);
  };
  for (int i = 0; i < n; ++i) {
    for (int off = 1; off <= degree / 2; ++off) link(i, (i + off) % n);
    if (degree % 2 == 1) link(i, (i + n / 2) % n);
  }
  Graph g;
  g.nodes = n;
  g.edges.assign(unique.begin(), unique.end());
  if (!g.is_regular(degree)) {
    throw ConfigError("make_regular_graph: no circulant " + std::to_string(degree) + "-regular graph on " +
                      std::to_string(n) + " nodes");
  }
  return g;
}

}  // namespace fpnet
