#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "skyx/common.hpp"
#include "skyx/graph.hpp"

using namespace skyx;

TEST_CASE("mix64 and derive_seed are deterministic and stream-separated") {
  CHECK(mix64(0) == mix64(0));
  CHECK(derive_seed(1, 7) == derive_seed(1, 7));
  CHECK(derive_seed(1, 7) != derive_seed(1, 8));
  CHECK(derive_seed(1, 7) != derive_seed(2, 7));
}

TEST_CASE("rng replays exactly and honors bounds") {
  rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  rng c(7);
  for (int i = 0; i < 1000; ++i) {
    CHECK(c.next_below(13) < 13);
    double d = c.next_double();
    CHECK(d >= 0.0);
    CHECK(d < 1.0);
    double e = c.next_in(2.0, 5.0);
    CHECK(e >= 2.0);
    CHECK(e < 5.0);
  }
}

TEST_CASE("bitvec works across word boundaries") {
  bitvec v;
  CHECK(v.popcount() == 0);
  CHECK_FALSE(v.test(200));
  v.set(0);
  v.set(63);
  v.set(64);
  v.set(130);
  CHECK(v.test(0));
  CHECK(v.test(63));
  CHECK(v.test(64));
  CHECK(v.test(130));
  CHECK_FALSE(v.test(1));
  CHECK(v.popcount() == 4);

  bitvec w;
  w.set(1);
  w.set(130);  // overlap
  v.or_with(w);
  CHECK(v.popcount() == 5);

  bitvec x;
  x.set(500);
  CHECK(union_popcount({&v, &w, &x}) == 6);
}

TEST_CASE("make_graph canonicalizes edges and builds sorted adjacency") {
  Graph g = make_graph(4, {{2, 1}, {1, 2}, {0, 0}, {3, 0}, {0, 1}});
  // self-loop dropped, duplicate (1,2)/(2,1) merged, all stored u < v
  REQUIRE(g.edge_count() == 3);
  CHECK(g.edges[0] == std::pair<int32_t, int32_t>{0, 1});
  CHECK(g.edges[1] == std::pair<int32_t, int32_t>{0, 3});
  CHECK(g.edges[2] == std::pair<int32_t, int32_t>{1, 2});
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.degree(3) == 1);
  // adjacency rows sorted by neighbor, edge ids consistent
  REQUIRE(g.adj[0].size() == 2);
  CHECK(g.adj[0][0].first == 1);
  CHECK(g.adj[0][0].second == 0);
  CHECK(g.adj[0][1].first == 3);
  CHECK(g.adj[0][1].second == 1);
}

TEST_CASE("make_graph rejects out-of-range endpoints") {
  CHECK_THROWS_AS(make_graph(2, {{0, 2}}), data_error);
  CHECK_THROWS_AS(make_graph(2, {{-1, 1}}), data_error);
}

TEST_CASE("subgraph construction enforces anchored connectivity") {
  Graph g = testutil::simple_graph(5, {{0, 1}, {1, 2}, {3, 4}});
  CHECK_THROWS_AS(make_subgraph(g, {}, 0), data_error);
  CHECK_THROWS_AS(make_subgraph(g, {2}, 0), data_error);      // anchor not incident
  CHECK_THROWS_AS(make_subgraph(g, {0, 2}, 0), data_error);   // disconnected
  Subgraph s = make_subgraph(g, {0, 1}, 0);
  CHECK(s.anchor == 0);
  CHECK(s.node_ids() == std::vector<int32_t>{0, 1, 2});
}

TEST_CASE("is_connected_with_anchor matches hand-checked cases") {
  Graph g = testutil::star_graph(3);  // edges (0,1),(0,2),(0,3)
  CHECK_FALSE(is_connected_with_anchor(g, {}, 0));
  CHECK(is_connected_with_anchor(g, {0, 1, 2}, 0));
  CHECK(is_connected_with_anchor(g, {1, 2}, 0));  // star minus one spoke
  CHECK(is_connected_with_anchor(g, {1}, 2));     // anchor is the far endpoint
  CHECK_FALSE(is_connected_with_anchor(g, {1}, 1));

  Graph h = testutil::simple_graph(4, {{0, 1}, {2, 3}});
  CHECK_FALSE(is_connected_with_anchor(h, {0, 1}, 0));  // two components
}

TEST_CASE("bfs_distances caps at max_dist") {
  Graph g = testutil::path_graph(6);
  std::vector<int32_t> d = bfs_distances(g, 0, 3);
  CHECK(d == std::vector<int32_t>{0, 1, 2, 3, -1, -1});
  std::vector<int32_t> full = bfs_distances(g, 2, 10);
  CHECK(full == std::vector<int32_t>{2, 1, 0, 1, 2, 3});
}

TEST_CASE("l_hop_subgraph collects exactly the edges within l hops") {
  Graph g = testutil::path_graph(5);  // edges (0,1),(1,2),(2,3),(3,4)
  Subgraph one = l_hop_subgraph(g, 2, 1);
  CHECK(one.edge_ids == std::vector<uint32_t>{1, 2});
  CHECK(one.node_ids() == std::vector<int32_t>{1, 2, 3});
  Subgraph two = l_hop_subgraph(g, 2, 2);
  CHECK(two.edge_ids == std::vector<uint32_t>{0, 1, 2, 3});

  // edge between two distance-l nodes belongs to the ball
  Graph tri = testutil::simple_graph(3, {{0, 1}, {0, 2}, {1, 2}});
  Subgraph ball = l_hop_subgraph(tri, 0, 1);
  CHECK(ball.edge_ids == std::vector<uint32_t>{0, 1, 2});
}

TEST_CASE("k_core_numbers matches hand-computed values") {
  // triangle 0-1-2 plus pendant 3 on node 0
  Graph g = testutil::simple_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}});
  CHECK(k_core_numbers(g) == std::vector<int32_t>{2, 2, 2, 1});

  Graph p = testutil::path_graph(4);
  CHECK(k_core_numbers(p) == std::vector<int32_t>{1, 1, 1, 1});

  Graph iso = testutil::simple_graph(3, {{0, 1}});
  CHECK(k_core_numbers(iso) == std::vector<int32_t>{1, 1, 0});
}
