#pragma once

// Graph fixtures shared by the solver, rebalancer and acceptance tests.

#include <random>
#include <vector>

#include "dlsgraph/topology.hpp"
#include "oracles.hpp"

namespace fixture {

/// Node i of the edge list becomes graph node i + 1 with key i; edge i becomes edge i + 1.
inline dlsgraph::Graph from_edges(std::size_t n, const std::vector<oracle::Edge>& edges,
                                  const std::vector<dlsgraph::Point>* coords = nullptr) {
  dlsgraph::Graph g;
  for (std::size_t i = 0; i < n; ++i) {
    dlsgraph::NodeInit init;
    init.key = static_cast<std::int64_t>(i);
    if (coords) init.coords = (*coords)[i];
    g.insert_node(init);
  }
  for (const auto& e : edges) {
    const auto dir = e.dir == 0 ? dlsgraph::Direction::kBoth
                                : (e.dir > 0 ? dlsgraph::Direction::kForward : dlsgraph::Direction::kBackward);
    g.insert_edge(e.a + 1, e.b + 1, e.w, dir);
  }
  return g;
}

inline std::vector<oracle::Edge> path_edges(std::size_t n) {
  std::vector<oracle::Edge> edges;
  for (std::uint32_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
  return edges;
}

struct Random {
  std::size_t n;
  std::vector<oracle::Edge> edges;
  std::vector<dlsgraph::Point> coords;
};

/// Connected-ish random graph: a random spanning tree plus extra edges. Weights in [0.5, 10).
inline Random random_graph(std::size_t n, std::size_t m, std::uint64_t seed, bool directed = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<> weight(0.5, 10.0), unit(0.0, 1.0);
  std::uniform_int_distribution<int> dir(-1, 1);
  Random out{n, {}, {}};
  for (std::size_t i = 0; i < n; ++i) out.coords.push_back({unit(rng) * 100, unit(rng) * 100});
  for (std::uint32_t i = 1; i < n && out.edges.size() < m; ++i) {
    std::uniform_int_distribution<std::uint32_t> pick(0, i - 1);
    out.edges.push_back({pick(rng), i, weight(rng), directed ? dir(rng) : 0});
  }
  std::uniform_int_distribution<std::uint32_t> any(0, static_cast<std::uint32_t>(n - 1));
  while (out.edges.size() < m) out.edges.push_back({any(rng), any(rng), weight(rng), directed ? dir(rng) : 0});
  return out;
}

/// rows x cols unit grid; node (r, c) has index r * cols + c and coordinates (c, r).
inline Random grid(std::size_t rows, std::size_t cols) {
  Random out{rows * cols, {}, {}};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      out.coords.push_back({static_cast<double>(c), static_cast<double>(r)});
      const auto v = static_cast<std::uint32_t>(r * cols + c);
      if (c + 1 < cols) out.edges.push_back({v, v + 1, 1.0});
      if (r + 1 < rows) out.edges.push_back({v, static_cast<std::uint32_t>(v + cols), 1.0});
    }
  }
  return out;
}

}  // namespace fixture
