#pragma once

#include <algorithm>
#include <vector>

#include "oracles.hpp"
#include "pqw/graph_model.hpp"
#include "pqw/rng.hpp"

namespace fixtures {

inline oracle::Adjacency to_adjacency(const pqw::Graph& g) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edges()) edges.emplace_back(e.u, e.v);
  return oracle::adjacency(g.n(), edges);
}

// Random connected non-bipartite graph on 3..max_n vertices.
inline pqw::Graph random_base_graph(pqw::CounterRng& rng, int max_n) {
  for (;;) {
    const int n = 3 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_n - 2)));
    const double density = 0.3 + 0.6 * rng.uniform();
    std::vector<pqw::Edge> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (rng.bernoulli(density)) edges.push_back({u, v});
      }
    }
    pqw::Graph g(n, edges);
    if (g.check().ok_as_base()) return g;
  }
}

// Random d-regular graph on n vertices by stub pairing with rejection.
inline std::vector<pqw::Edge> random_regular_edges(pqw::CounterRng& rng, int n, int d) {
  for (;;) {
    std::vector<int> stubs;
    for (int v = 0; v < n; ++v) {
      for (int k = 0; k < d; ++k) stubs.push_back(v);
    }
    for (int i = static_cast<int>(stubs.size()) - 1; i > 0; --i) {
      std::swap(stubs[i], stubs[rng.uniform_below(static_cast<std::uint64_t>(i) + 1)]);
    }
    std::vector<std::vector<bool>> seen(n, std::vector<bool>(n, false));
    std::vector<pqw::Edge> edges;
    bool ok = true;
    for (std::size_t i = 0; ok && i < stubs.size(); i += 2) {
      const int u = stubs[i], v = stubs[i + 1];
      if (u == v || seen[u][v]) ok = false;
      else {
        seen[u][v] = seen[v][u] = true;
        edges.push_back({u, v});
      }
    }
    if (ok) return edges;
  }
}

// Random connected non-bipartite regular graph (symmetric transition
// matrix) on 3..max_n vertices. Dense degrees come from complements.
inline pqw::Graph random_regular_base_graph(pqw::CounterRng& rng, int max_n) {
  for (;;) {
    const int n = 3 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(max_n - 2)));
    const int d = 2 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - 2)));
    if ((n * d) % 2 != 0) continue;
    const int sparse = std::min(d, n - 1 - d);
    pqw::Graph g(n, random_regular_edges(rng, n, sparse));
    if (sparse != d) g = g.complement();
    if (g.check().ok_as_base()) return g;
  }
}

// Random marked set of size 0..n-1.
inline pqw::MarkedSet random_marked(pqw::CounterRng& rng, int n, bool allow_empty = true) {
  const int lo = allow_empty ? 0 : 1;
  const int m = lo + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n - lo)));
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  for (int i = n - 1; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_below(static_cast<std::uint64_t>(i) + 1)]);
  }
  return pqw::MarkedSet(n, std::vector<int>(order.begin(), order.begin() + m));
}

}  // namespace fixtures
