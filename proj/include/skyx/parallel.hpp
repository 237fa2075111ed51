#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skyx/diversify.hpp"
#include "skyx/explain.hpp"
#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"

namespace skyx {

/// Batch execution knobs. Signature length must equal bands * rows. Neither
/// clustering nor sharing may change any query's result; they only move work
/// around, so a batch is reproducible under any thread count.
struct ParallelConfig {
  int threads = 1;
  bool clustering = true;
  bool sharing = true;
  int signature_len = 64;
  int bands = 16;
  int rows = 4;
  uint64_t seed = 1;
  bool diversified = false;  // run the diversified updater instead of the skyline one
};

/// MinHash signature per query node over its L-hop node set.
std::vector<std::vector<uint64_t>> minhash_signatures(const Graph& g,
                                                      const std::vector<int32_t>& nodes,
                                                      int layers, int signature_len,
                                                      uint64_t seed);

/// Banded LSH over the signatures; queries sharing any band collapse into one
/// cluster. Returns a dense cluster id per query, numbered by first
/// appearance in input order.
std::vector<int> cluster_partition(const std::vector<std::vector<uint64_t>>& signatures,
                                   int bands, int rows);

/// Work estimate for one query: edge count of its L-hop neighborhood
/// (0 when the node is isolated or out of range; the query itself will
/// report the error).
int64_t estimate_cost(const Graph& g, int32_t node, int layers);

/// Spread clusters over threads: clusters by descending total cost onto the
/// currently lightest thread, then single-query moves until the per-thread
/// query counts differ by at most one. Returns query indices per thread.
std::vector<std::vector<int>> assign_to_threads(const std::vector<int>& cluster_of,
                                                const std::vector<int64_t>& cost_of,
                                                int threads);

/// Per-thread execution order: descending k-core number of the query node,
/// ties toward the lower node id, then input position.
void order_by_core(const Graph& g, const std::vector<int32_t>& nodes,
                   std::vector<int>& query_indices);

struct QueryOutcome {
  int32_t node = -1;
  bool ok = false;
  std::string error;
  ExplainResult result;
};

struct BatchStats {
  int clusters = 0;
  int64_t failed = 0;
  std::vector<int64_t> thread_queries;
  std::vector<int64_t> thread_cost;
};

struct BatchResult {
  std::vector<QueryOutcome> outcomes;  // input order
  BatchStats stats;
};

/// Clustered parallel batch over one shared graph and model; each query
/// carries its own node, k, epsilon, measures and strategy. With sharing
/// enabled every thread keeps its own estimate table, so threads never touch
/// shared mutable state and results match the sequential run query by query.
/// Failures are isolated per query.
BatchResult para_sx(const Graph& g, const GnnModel& m,
                    const std::vector<QueryConfig>& queries, const ParallelConfig& pc);

}  // namespace skyx
