#include "skyx/parallel.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <thread>
#include <unordered_map>

namespace skyx {

std::vector<std::vector<uint64_t>> minhash_signatures(const Graph& g,
                                                      const std::vector<int32_t>& nodes,
                                                      int layers, int signature_len,
                                                      uint64_t seed) {
  if (signature_len < 1) throw usage_error("signature length must be >= 1");
  if (layers < 1) throw usage_error("signatures need a positive layer count");
  std::vector<uint64_t> salt(static_cast<size_t>(signature_len));
  for (int j = 0; j < signature_len; ++j)
    salt[static_cast<size_t>(j)] = derive_seed(seed, static_cast<uint64_t>(j));

  std::vector<std::vector<uint64_t>> sigs(nodes.size());
  for (size_t qi = 0; qi < nodes.size(); ++qi) {
    std::vector<uint64_t>& sig = sigs[qi];
    sig.assign(static_cast<size_t>(signature_len), UINT64_MAX);
    if (nodes[qi] < 0 || nodes[qi] >= g.n) continue;  // empty set, handled at run time
    std::vector<int32_t> dist = bfs_distances(g, nodes[qi], layers);
    for (int64_t v = 0; v < g.n; ++v) {
      if (dist[static_cast<size_t>(v)] < 0) continue;
      for (int j = 0; j < signature_len; ++j) {
        uint64_t h = mix64(salt[static_cast<size_t>(j)] ^ (static_cast<uint64_t>(v) + 1));
        if (h < sig[static_cast<size_t>(j)]) sig[static_cast<size_t>(j)] = h;
      }
    }
  }
  return sigs;
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

uint64_t band_key(const std::vector<uint64_t>& sig, int band, int rows) {
  uint64_t h = mix64(0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(band));
  for (int r = 0; r < rows; ++r)
    h = mix64(h ^ sig[static_cast<size_t>(band) * static_cast<size_t>(rows) +
                      static_cast<size_t>(r)]);
  return h;
}

}  // namespace

std::vector<int> cluster_partition(const std::vector<std::vector<uint64_t>>& signatures,
                                   int bands, int rows) {
  if (bands < 1 || rows < 1) throw usage_error("bands and rows must be >= 1");
  size_t n = signatures.size();
  for (const auto& s : signatures)
    if (s.size() != static_cast<size_t>(bands) * static_cast<size_t>(rows))
      throw usage_error("signature length must equal bands * rows");

  UnionFind uf(n);
  for (int b = 0; b < bands; ++b) {
    std::unordered_map<uint64_t, int> first_with_key;
    first_with_key.reserve(n * 2);
    for (size_t qi = 0; qi < n; ++qi) {
      uint64_t key = band_key(signatures[qi], b, rows);
      auto [it, fresh] = first_with_key.emplace(key, static_cast<int>(qi));
      if (!fresh) uf.unite(it->second, static_cast<int>(qi));
    }
  }

  // Dense cluster ids numbered by first appearance: the partition is a pure
  // function of the signatures, independent of hash-map iteration order.
  std::vector<int> cluster(n, -1);
  std::unordered_map<int, int> root_to_id;
  int next = 0;
  for (size_t qi = 0; qi < n; ++qi) {
    int root = uf.find(static_cast<int>(qi));
    auto [it, fresh] = root_to_id.emplace(root, next);
    if (fresh) ++next;
    cluster[qi] = it->second;
  }
  return cluster;
}

int64_t estimate_cost(const Graph& g, int32_t node, int layers) {
  if (node < 0 || node >= g.n || layers < 1) return 0;
  std::vector<int32_t> dist = bfs_distances(g, node, layers);
  int64_t edges = 0;
  for (auto [u, v] : g.edges)
    if (dist[static_cast<size_t>(u)] >= 0 && dist[static_cast<size_t>(v)] >= 0) ++edges;
  return edges;
}

std::vector<std::vector<int>> assign_to_threads(const std::vector<int>& cluster_of,
                                                const std::vector<int64_t>& cost_of,
                                                int threads) {
  if (threads < 1) throw usage_error("threads must be >= 1");
  if (cluster_of.size() != cost_of.size())
    throw usage_error("cluster and cost arrays must align");
  size_t n = cluster_of.size();

  int nclusters = 0;
  for (int c : cluster_of) nclusters = std::max(nclusters, c + 1);
  std::vector<int64_t> cluster_cost(static_cast<size_t>(nclusters), 0);
  std::vector<std::vector<int>> cluster_members(static_cast<size_t>(nclusters));
  for (size_t qi = 0; qi < n; ++qi) {
    cluster_cost[static_cast<size_t>(cluster_of[qi])] += cost_of[qi];
    cluster_members[static_cast<size_t>(cluster_of[qi])].push_back(static_cast<int>(qi));
  }

  std::vector<int> order(static_cast<size_t>(nclusters));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cluster_cost[static_cast<size_t>(a)] != cluster_cost[static_cast<size_t>(b)])
      return cluster_cost[static_cast<size_t>(a)] > cluster_cost[static_cast<size_t>(b)];
    return a < b;
  });

  std::vector<std::vector<int>> assigned(static_cast<size_t>(threads));
  std::vector<int64_t> load(static_cast<size_t>(threads), 0);
  for (int c : order) {
    int lightest = 0;
    for (int t = 1; t < threads; ++t)
      if (load[static_cast<size_t>(t)] < load[static_cast<size_t>(lightest)]) lightest = t;
    for (int qi : cluster_members[static_cast<size_t>(c)])
      assigned[static_cast<size_t>(lightest)].push_back(qi);
    load[static_cast<size_t>(lightest)] += cluster_cost[static_cast<size_t>(c)];
  }

  // Rebalance counts to within one query: move the cheapest query from the
  // fullest thread (lowest index on ties) to the emptiest.
  while (true) {
    int hi = 0, lo = 0;
    for (int t = 1; t < threads; ++t) {
      if (assigned[static_cast<size_t>(t)].size() > assigned[static_cast<size_t>(hi)].size())
        hi = t;
      if (assigned[static_cast<size_t>(t)].size() < assigned[static_cast<size_t>(lo)].size())
        lo = t;
    }
    if (assigned[static_cast<size_t>(hi)].size() <= assigned[static_cast<size_t>(lo)].size() + 1)
      break;
    auto& donor = assigned[static_cast<size_t>(hi)];
    size_t pick = 0;
    for (size_t i = 1; i < donor.size(); ++i) {
      if (cost_of[static_cast<size_t>(donor[i])] < cost_of[static_cast<size_t>(donor[pick])] ||
          (cost_of[static_cast<size_t>(donor[i])] == cost_of[static_cast<size_t>(donor[pick])] &&
           donor[i] < donor[pick]))
        pick = i;
    }
    assigned[static_cast<size_t>(lo)].push_back(donor[pick]);
    donor.erase(donor.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return assigned;
}

void order_by_core(const Graph& g, const std::vector<int32_t>& nodes,
                   std::vector<int>& query_indices) {
  std::vector<int32_t> core = k_core_numbers(g);
  auto core_of = [&](int qi) {
    int32_t v = nodes[static_cast<size_t>(qi)];
    return (v >= 0 && v < g.n) ? core[static_cast<size_t>(v)] : -1;
  };
  std::sort(query_indices.begin(), query_indices.end(), [&](int a, int b) {
    int32_t ca = core_of(a), cb = core_of(b);
    if (ca != cb) return ca > cb;
    int32_t na = nodes[static_cast<size_t>(a)], nb = nodes[static_cast<size_t>(b)];
    if (na != nb) return na < nb;
    return a < b;
  });
}

BatchResult para_sx(const Graph& g, const GnnModel& m,
                    const std::vector<QueryConfig>& queries, const ParallelConfig& pc) {
  if (pc.threads < 1) throw usage_error("threads must be >= 1");
  if (pc.signature_len != pc.bands * pc.rows)
    throw usage_error("signature length must equal bands * rows");
  validate_model(m);

  BatchResult res;
  res.outcomes.resize(queries.size());
  size_t n = queries.size();

  std::vector<int32_t> nodes(n);
  std::vector<int> layers(n);
  for (size_t qi = 0; qi < n; ++qi) {
    nodes[qi] = queries[qi].node;
    // Planning stays total even for malformed layer overrides; the query run
    // itself reports those.
    layers[qi] = queries[qi].layers >= 1 ? queries[qi].layers : m.layer_count();
  }

  std::vector<int64_t> cost(n, 0);
  for (size_t qi = 0; qi < n; ++qi) cost[qi] = estimate_cost(g, nodes[qi], layers[qi]);

  std::vector<std::vector<int>> plan;
  if (pc.clustering) {
    std::vector<std::vector<uint64_t>> sigs(n);
    for (size_t qi = 0; qi < n; ++qi)
      sigs[qi] = minhash_signatures(g, {nodes[qi]}, layers[qi], pc.signature_len,
                                    pc.seed)[0];
    std::vector<int> cluster = cluster_partition(sigs, pc.bands, pc.rows);
    res.stats.clusters = cluster.empty() ? 0 : *std::max_element(cluster.begin(), cluster.end()) + 1;
    plan = assign_to_threads(cluster, cost, pc.threads);
  } else {
    // Seeded shuffle, contiguous chunks with sizes within one.
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng r(derive_seed(pc.seed, 0xC1));
    for (size_t i = n; i > 1; --i) {
      size_t j = static_cast<size_t>(r.next_below(i));
      std::swap(order[i - 1], order[j]);
    }
    plan.assign(static_cast<size_t>(pc.threads), {});
    size_t chunk = n / static_cast<size_t>(pc.threads);
    size_t extra = n % static_cast<size_t>(pc.threads);
    size_t at = 0;
    for (size_t t = 0; t < static_cast<size_t>(pc.threads); ++t) {
      size_t take = chunk + (t < extra ? 1 : 0);
      for (size_t i = 0; i < take; ++i) plan[t].push_back(order[at++]);
    }
    res.stats.clusters = 0;
  }

  res.stats.thread_queries.resize(static_cast<size_t>(pc.threads), 0);
  res.stats.thread_cost.resize(static_cast<size_t>(pc.threads), 0);
  for (int t = 0; t < pc.threads; ++t) {
    order_by_core(g, nodes, plan[static_cast<size_t>(t)]);
    res.stats.thread_queries[static_cast<size_t>(t)] =
        static_cast<int64_t>(plan[static_cast<size_t>(t)].size());
    for (int qi : plan[static_cast<size_t>(t)])
      res.stats.thread_cost[static_cast<size_t>(t)] += cost[static_cast<size_t>(qi)];
  }

  // One estimate table per thread: queries on the same thread reuse each
  // other's edge estimates, threads never share mutable state.
  std::vector<std::unique_ptr<EdgeInfoTable>> tables(static_cast<size_t>(pc.threads));
  if (pc.sharing)
    for (auto& t : tables) t = std::make_unique<EdgeInfoTable>(g.edges.size());

  auto run_one = [&](int qi, EdgeInfoTable* table) {
    QueryOutcome& out = res.outcomes[static_cast<size_t>(qi)];
    const QueryConfig& q = queries[static_cast<size_t>(qi)];
    out.node = q.node;
    try {
      if (pc.diversified)
        out.result = dsx(g, m, q, table);
      else if (q.mode == ExplainMode::grow)
        out.result = asx_insert(g, m, q, table);
      else
        out.result = asx_op(g, m, q, table);
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  };

  if (pc.threads == 1) {
    for (int qi : plan[0]) run_one(qi, tables[0].get());
  } else {
    std::vector<std::thread> workers;
    workers.reserve(static_cast<size_t>(pc.threads));
    for (int t = 0; t < pc.threads; ++t)
      workers.emplace_back([&, t] {
        for (int qi : plan[static_cast<size_t>(t)]) run_one(qi, tables[static_cast<size_t>(t)].get());
      });
    for (auto& w : workers) w.join();
  }

  for (const auto& out : res.outcomes)
    if (!out.ok) ++res.stats.failed;
  return res;
}

}  // namespace skyx
