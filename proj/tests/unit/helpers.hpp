#pragma once

#include <utility>
#include <vector>

#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"

namespace testutil {

// Graph with unit features and unlabeled nodes; make_graph canonicalizes the
// edge list.
inline skyx::Graph simple_graph(int64_t n, std::vector<std::pair<int32_t, int32_t>> edges,
                                size_t feature_dim = 1) {
  skyx::Graph g = skyx::make_graph(n, std::move(edges));
  g.features.assign(static_cast<size_t>(n), std::vector<double>(feature_dim, 1.0));
  return g;
}

// path 0-1-2-...-(n-1)
inline skyx::Graph path_graph(int64_t n, size_t feature_dim = 1) {
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int32_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return simple_graph(n, std::move(edges), feature_dim);
}

// star with center 0 and `leaves` spokes
inline skyx::Graph star_graph(int32_t leaves, size_t feature_dim = 1) {
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int32_t i = 1; i <= leaves; ++i) edges.emplace_back(0, i);
  return simple_graph(leaves + 1, std::move(edges), feature_dim);
}

}  // namespace testutil
