#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "skyx/common.hpp"

namespace skyx {

/// Undirected attributed graph. Edges are stored once with u < v; the
/// adjacency index is kept in sync by the constructors and never mutated
/// afterwards. Node ids are dense 0..n-1; `orig_ids` preserves whatever the
/// source file used.
struct Graph {
  int64_t n = 0;
  std::vector<std::pair<int32_t, int32_t>> edges;
  std::vector<std::vector<double>> features;  // n rows, uniform dimension
  std::vector<int32_t> labels;                // -1 when unlabeled
  std::vector<uint8_t> gt;                    // ground-truth membership flags
  std::vector<int64_t> orig_ids;              // source ids, dense order

  // adjacency: per node, (neighbor, edge id) pairs sorted by neighbor
  std::vector<std::vector<std::pair<int32_t, uint32_t>>> adj;

  int feature_dim() const { return features.empty() ? 0 : static_cast<int>(features[0].size()); }
  int degree(int32_t v) const { return static_cast<int>(adj[v].size()); }
  int64_t edge_count() const { return static_cast<int64_t>(edges.size()); }

  /// Rebuild the adjacency index from `edges`. Call after assembling fields.
  void build_adjacency();
};

/// Construct a graph from an edge list; validates indices, canonicalizes to
/// u < v, removes duplicates and self-loops. Missing features default to
/// empty rows, missing labels to -1.
Graph make_graph(int64_t n, std::vector<std::pair<int32_t, int32_t>> edge_list);

/// Anchored edge-induced subgraph of a parent graph. Invariants enforced at
/// construction: non-empty edge set, anchor incident to at least one edge,
/// edge-induced graph connected.
struct Subgraph {
  const Graph* parent = nullptr;
  std::vector<uint32_t> edge_ids;  // sorted ascending
  int32_t anchor = -1;

  /// Sorted endpoint set of `edge_ids`.
  std::vector<int32_t> node_ids() const;
};

/// Validating constructor for Subgraph. Throws data_error on any invariant
/// violation (empty set, anchor not incident, disconnected).
Subgraph make_subgraph(const Graph& g, std::vector<uint32_t> edge_ids, int32_t anchor);

/// True when the edge-induced graph over `edge_ids` is connected and contains
/// `anchor`. Empty edge sets are never connected-with-anchor.
bool is_connected_with_anchor(const Graph& g, const std::vector<uint32_t>& edge_ids, int32_t anchor);

/// BFS distances from `v` capped at `max_dist` (entries beyond cap stay -1).
std::vector<int32_t> bfs_distances(const Graph& g, int32_t v, int32_t max_dist);

/// L-hop neighborhood subgraph of `v`: node-induced on all nodes within L
/// hops, anchored at `v`. Throws on out-of-range `v`, non-positive L, or an
/// isolated `v` (empty interpretable space).
Subgraph l_hop_subgraph(const Graph& g, int32_t v, int32_t l);

/// k-core number per node (standard peeling).
std::vector<int32_t> k_core_numbers(const Graph& g);

}  // namespace skyx
