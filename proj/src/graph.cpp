#include "skyx/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace skyx {

void Graph::build_adjacency() {
  adj.assign(static_cast<size_t>(n), {});
  for (uint32_t eid = 0; eid < edges.size(); ++eid) {
    auto [u, v] = edges[eid];
    adj[u].push_back({v, eid});
    adj[v].push_back({u, eid});
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
}

Graph make_graph(int64_t n, std::vector<std::pair<int32_t, int32_t>> edge_list) {
  if (n < 0) throw data_error("graph: negative node count");
  std::set<std::pair<int32_t, int32_t>> seen;
  std::vector<std::pair<int32_t, int32_t>> canon;
  for (auto [u, v] : edge_list) {
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw data_error("graph: edge endpoint out of range: (" + std::to_string(u) + "," +
                       std::to_string(v) + ")");
    if (u == v) continue;  // self-loops dropped at ingest
    if (u > v) std::swap(u, v);
    if (seen.insert({u, v}).second) canon.push_back({u, v});
  }
  std::sort(canon.begin(), canon.end());
  Graph g;
  g.n = n;
  g.edges = std::move(canon);
  g.features.assign(static_cast<size_t>(n), {});
  g.labels.assign(static_cast<size_t>(n), -1);
  g.gt.assign(static_cast<size_t>(n), 0);
  g.orig_ids.resize(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) g.orig_ids[i] = i;
  g.build_adjacency();
  return g;
}

std::vector<int32_t> Subgraph::node_ids() const {
  std::vector<int32_t> nodes;
  nodes.reserve(edge_ids.size() * 2);
  for (uint32_t eid : edge_ids) {
    nodes.push_back(parent->edges[eid].first);
    nodes.push_back(parent->edges[eid].second);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

bool is_connected_with_anchor(const Graph& g, const std::vector<uint32_t>& edge_ids,
                              int32_t anchor) {
  if (edge_ids.empty()) return false;
  // local adjacency over the edge-induced node set
  std::vector<int32_t> nodes;
  for (uint32_t eid : edge_ids) {
    if (eid >= g.edges.size()) throw data_error("subgraph: edge id out of range");
    nodes.push_back(g.edges[eid].first);
    nodes.push_back(g.edges[eid].second);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  auto local = [&](int32_t v) {
    return static_cast<int32_t>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin());
  };
  if (!std::binary_search(nodes.begin(), nodes.end(), anchor)) return false;
  std::vector<std::vector<int32_t>> la(nodes.size());
  for (uint32_t eid : edge_ids) {
    int32_t a = local(g.edges[eid].first), b = local(g.edges[eid].second);
    la[a].push_back(b);
    la[b].push_back(a);
  }
  std::vector<uint8_t> vis(nodes.size(), 0);
  std::queue<int32_t> q;
  q.push(local(anchor));
  vis[local(anchor)] = 1;
  size_t reached = 1;
  while (!q.empty()) {
    int32_t u = q.front();
    q.pop();
    for (int32_t w : la[u])
      if (!vis[w]) {
        vis[w] = 1;
        ++reached;
        q.push(w);
      }
  }
  return reached == nodes.size();
}

Subgraph make_subgraph(const Graph& g, std::vector<uint32_t> edge_ids, int32_t anchor) {
  std::sort(edge_ids.begin(), edge_ids.end());
  edge_ids.erase(std::unique(edge_ids.begin(), edge_ids.end()), edge_ids.end());
  if (edge_ids.empty()) throw data_error("subgraph: empty edge set");
  if (anchor < 0 || anchor >= g.n) throw data_error("subgraph: anchor out of range");
  bool incident = false;
  for (uint32_t eid : edge_ids) {
    if (eid >= g.edges.size()) throw data_error("subgraph: edge id out of range");
    if (g.edges[eid].first == anchor || g.edges[eid].second == anchor) incident = true;
  }
  if (!incident) throw data_error("subgraph: anchor has no incident edge in the candidate");
  if (!is_connected_with_anchor(g, edge_ids, anchor))
    throw data_error("subgraph: candidate not connected");
  Subgraph s;
  s.parent = &g;
  s.edge_ids = std::move(edge_ids);
  s.anchor = anchor;
  return s;
}

std::vector<int32_t> bfs_distances(const Graph& g, int32_t v, int32_t max_dist) {
  std::vector<int32_t> dist(static_cast<size_t>(g.n), -1);
  dist[v] = 0;
  std::queue<int32_t> q;
  q.push(v);
  while (!q.empty()) {
    int32_t u = q.front();
    q.pop();
    if (dist[u] == max_dist) continue;
    for (auto [w, eid] : g.adj[u]) {
      (void)eid;
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

Subgraph l_hop_subgraph(const Graph& g, int32_t v, int32_t l) {
  if (v < 0 || v >= g.n) throw data_error("l_hop_subgraph: node out of range");
  if (l <= 0) throw data_error("l_hop_subgraph: hop count must be positive");
  if (g.adj[v].empty())
    throw data_error("l_hop_subgraph: node " + std::to_string(v) +
                     " has no incident edges (empty interpretable space)");
  std::vector<int32_t> dist = bfs_distances(g, v, l);
  std::vector<uint32_t> eids;
  for (uint32_t eid = 0; eid < g.edges.size(); ++eid) {
    auto [a, b] = g.edges[eid];
    if (dist[a] >= 0 && dist[b] >= 0) eids.push_back(eid);
  }
  return make_subgraph(g, std::move(eids), v);
}

std::vector<int32_t> k_core_numbers(const Graph& g) {
  // Batagelj-Zaversnik bucket peeling; O(n + m).
  size_t n = static_cast<size_t>(g.n);
  if (n == 0) return {};
  std::vector<int32_t> deg(n);
  int32_t md = 0;
  for (size_t v = 0; v < n; ++v) {
    deg[v] = g.degree(static_cast<int32_t>(v));
    md = std::max(md, deg[v]);
  }
  std::vector<size_t> bin(static_cast<size_t>(md) + 1, 0), pos(n);
  std::vector<int32_t> vert(n);
  for (size_t v = 0; v < n; ++v) bin[deg[v]]++;
  size_t start = 0;
  for (int32_t d = 0; d <= md; ++d) {
    size_t num = bin[d];
    bin[d] = start;
    start += num;
  }
  for (size_t v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]];
    vert[pos[v]] = static_cast<int32_t>(v);
    bin[deg[v]]++;
  }
  for (int32_t d = md; d >= 1; --d) bin[d] = bin[d - 1];
  bin[0] = 0;
  for (size_t i = 0; i < n; ++i) {
    int32_t v = vert[i];
    for (auto [u, eid] : g.adj[v]) {
      (void)eid;
      if (deg[u] > deg[v]) {
        int32_t du = deg[u];
        size_t pu = pos[u], pw = bin[du];
        int32_t w = vert[pw];
        if (u != w) {
          pos[u] = pw;
          pos[w] = pu;
          vert[pu] = w;
          vert[pw] = u;
        }
        bin[du]++;
        deg[u]--;
      }
    }
  }
  return deg;
}

}  // namespace skyx
