#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "helpers.hpp"
#include "skyx/common.hpp"
#include "skyx/explain.hpp"
#include "skyx/parallel.hpp"

using namespace skyx;

namespace {

double agreement(const std::vector<uint64_t>& a, const std::vector<uint64_t>& b) {
  size_t same = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] == b[i]) ++same;
  return static_cast<double>(same) / static_cast<double>(a.size());
}

// two disjoint 4-cliques
Graph two_cliques() {
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int base : {0, 4})
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) edges.emplace_back(base + i, base + j);
  return testutil::simple_graph(8, std::move(edges));
}

QueryConfig plain_query(int32_t node) {
  QueryConfig q;
  q.node = node;
  q.k = 2;
  q.eps = 0.1;
  q.spec = make_measure_spec({"fdl+", "fdl-", "conc"});
  return q;
}

}  // namespace

TEST_CASE("identical node sets produce identical minhash signatures") {
  Graph g = testutil::path_graph(5);
  auto sigs = minhash_signatures(g, {2, 2}, 1, 64, 7);
  REQUIRE(sigs.size() == 2);
  CHECK(sigs[0] == sigs[1]);
  // reruns with the same seed replay; another seed moves the minima
  auto again = minhash_signatures(g, {2, 2}, 1, 64, 7);
  CHECK(sigs[0] == again[0]);
  auto other = minhash_signatures(g, {2}, 1, 64, 8);
  CHECK(sigs[0] != other[0]);
}

TEST_CASE("signature agreement tracks the Jaccard similarity") {
  // balls of nodes 1 and 2 on a path share {1,2} of {0,1,2,3}: J = 0.5
  Graph g = testutil::path_graph(4);
  auto sigs = minhash_signatures(g, {1, 2}, 1, 256, 11);
  double a = agreement(sigs[0], sigs[1]);
  CHECK(a > 0.35);
  CHECK(a < 0.65);

  // two far-apart stars: disjoint balls agree almost nowhere
  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int i = 1; i <= 40; ++i) edges.emplace_back(0, i);
  for (int i = 42; i <= 81; ++i) edges.emplace_back(41, i);
  Graph h = testutil::simple_graph(82, std::move(edges));
  auto far = minhash_signatures(h, {0, 41}, 1, 64, 11);
  CHECK(agreement(far[0], far[1]) < 0.1);
}

TEST_CASE("banded clustering separates communities and merges twins") {
  Graph g = two_cliques();
  std::vector<int32_t> nodes = {0, 1, 2, 3, 4, 5, 6, 7};
  auto sigs = minhash_signatures(g, nodes, 1, 64, 5);
  std::vector<int> cluster = cluster_partition(sigs, 16, 4);
  REQUIRE(cluster.size() == nodes.size());

  // every clique-1 ball is {0,1,2,3}; every clique-2 ball is {4,5,6,7}
  for (int i = 1; i < 4; ++i) CHECK(cluster[static_cast<size_t>(i)] == cluster[0]);
  for (int i = 5; i < 8; ++i) CHECK(cluster[static_cast<size_t>(i)] == cluster[4]);
  CHECK(cluster[0] != cluster[4]);
  CHECK(cluster[0] == 0);  // ids numbered by first appearance

  // dissimilar singletons stay apart
  Graph p = testutil::path_graph(30);
  auto far = minhash_signatures(p, {0, 14, 29}, 1, 64, 5);
  std::vector<int> solo = cluster_partition(far, 16, 4);
  CHECK(std::set<int>(solo.begin(), solo.end()).size() == 3);

  CHECK_THROWS_AS(cluster_partition(sigs, 16, 5), usage_error);  // 16*5 != 64
}

TEST_CASE("estimate_cost counts neighborhood edges") {
  Graph g = testutil::star_graph(5);
  CHECK(estimate_cost(g, 0, 1) == 5);
  CHECK(estimate_cost(g, 1, 1) == 1);  // leaf ball is just its spoke
  CHECK(estimate_cost(g, 0, 1) == 5 * estimate_cost(g, 1, 1));

  Graph p = testutil::path_graph(7);
  CHECK(estimate_cost(p, 3, 1) == 2);
  CHECK(estimate_cost(p, 3, 2) == 4);  // strictly grows with the ball
  CHECK(estimate_cost(p, 99, 1) == 0);  // malformed query costs nothing to plan
}

TEST_CASE("thread assignment balances weight and count") {
  // singleton clusters, costs 5,4,3,2,1 on two threads
  std::vector<int> cluster_of = {0, 1, 2, 3, 4};
  std::vector<int64_t> cost_of = {5, 4, 3, 2, 1};
  auto parts = assign_to_threads(cluster_of, cost_of, 2);
  REQUIRE(parts.size() == 2);

  std::vector<int64_t> weight(2, 0);
  std::vector<size_t> count(2, 0);
  std::vector<char> seen(5, 0);
  for (size_t t = 0; t < parts.size(); ++t)
    for (int qi : parts[t]) {
      weight[t] += cost_of[static_cast<size_t>(qi)];
      ++count[t];
      seen[static_cast<size_t>(qi)] = 1;
    }
  CHECK(std::count(seen.begin(), seen.end(), 1) == 5);  // every query exactly once
  CHECK(std::max(count[0], count[1]) - std::min(count[0], count[1]) <= 1);
  int64_t max_single = 5;
  CHECK(std::max(weight[0], weight[1]) <= std::min(weight[0], weight[1]) + max_single);
}

TEST_CASE("count rebalancing splits a heavy cluster across threads") {
  // one expensive singleton vs one four-query cluster of cheap queries
  std::vector<int> cluster_of = {0, 1, 1, 1, 1};
  std::vector<int64_t> cost_of = {10, 1, 1, 1, 1};
  auto parts = assign_to_threads(cluster_of, cost_of, 2);
  REQUIRE(parts.size() == 2);
  size_t c0 = parts[0].size(), c1 = parts[1].size();
  CHECK(c0 + c1 == 5);
  CHECK((std::max(c0, c1) - std::min(c0, c1)) <= 1);

  // threads beyond the query count stay empty but are still returned
  auto wide = assign_to_threads({0, 1}, {1, 1}, 4);
  REQUIRE(wide.size() == 4);
  size_t used = 0;
  for (auto& p : wide) used += p.size();
  CHECK(used == 2);
}

TEST_CASE("per-thread order follows core number, node id, then position") {
  // triangle 0-1-2 with pendant 3
  Graph g = testutil::simple_graph(4, {{0, 1}, {0, 2}, {1, 2}, {0, 3}});
  std::vector<int32_t> nodes = {3, 1, 0, 3};
  std::vector<int> order = {0, 1, 2, 3};
  order_by_core(g, nodes, order);
  // cores: nodes 0,1 -> 2; node 3 -> 1; equal cores by node id; equal nodes by position
  CHECK(order == std::vector<int>{2, 1, 0, 3});
}

TEST_CASE("single-thread batch without sharing replays sequential runs exactly") {
  Graph g = two_cliques();
  rng r(90);
  for (auto& row : g.features)
    for (double& f : row) f = r.next_in(-1.0, 1.0);
  GnnModel m = random_model(1, 4, 2, 1, 33);

  std::vector<QueryConfig> queries;
  for (int32_t v : {0, 2, 5, 7, 1}) queries.push_back(plain_query(v));

  ParallelConfig pc;
  pc.threads = 1;
  pc.sharing = false;
  pc.clustering = false;
  BatchResult br = para_sx(g, m, queries, pc);
  REQUIRE(br.outcomes.size() == queries.size());

  for (size_t i = 0; i < queries.size(); ++i) {
    const QueryOutcome& out = br.outcomes[i];
    REQUIRE(out.ok);
    CHECK(out.node == queries[i].node);
    ExplainResult seq = asx_op(g, m, queries[i]);
    REQUIRE(out.result.explanation.size() == seq.explanation.size());
    CHECK(dominance_power(out.result.sg, out.result.explanation) ==
          dominance_power(seq.sg, seq.explanation));
    for (size_t j = 0; j < seq.explanation.size(); ++j) {
      const State& a = out.result.sg.states[out.result.explanation[j]];
      const State& b = seq.sg.states[seq.explanation[j]];
      CHECK(a.edges == b.edges);
      CHECK(a.phi == b.phi);
    }
  }
}

TEST_CASE("clustering, sharing and threads leave per-query results unchanged") {
  Graph g = two_cliques();
  rng r(91);
  for (auto& row : g.features)
    for (double& f : row) f = r.next_in(-1.0, 1.0);
  GnnModel m = random_model(1, 4, 2, 1, 34);

  std::vector<QueryConfig> queries;
  for (int32_t v : {0, 1, 2, 3, 4, 5, 6, 7}) queries.push_back(plain_query(v));

  ParallelConfig plain;
  plain.threads = 1;
  plain.sharing = false;
  plain.clustering = false;
  BatchResult base = para_sx(g, m, queries, plain);

  ParallelConfig tuned;
  tuned.threads = 3;
  tuned.sharing = true;
  tuned.clustering = true;
  BatchResult fast = para_sx(g, m, queries, tuned);

  REQUIRE(fast.outcomes.size() == base.outcomes.size());
  CHECK(fast.stats.clusters == 2);
  CHECK(fast.stats.thread_queries.size() == 3);
  for (size_t i = 0; i < base.outcomes.size(); ++i) {
    REQUIRE(fast.outcomes[i].ok);
    const ExplainResult& a = base.outcomes[i].result;
    const ExplainResult& b = fast.outcomes[i].result;
    REQUIRE(a.explanation.size() == b.explanation.size());
    for (size_t j = 0; j < a.explanation.size(); ++j) {
      CHECK(a.sg.states[a.explanation[j]].edges == b.sg.states[b.explanation[j]].edges);
      CHECK(a.sg.states[a.explanation[j]].phi == b.sg.states[b.explanation[j]].phi);
    }
  }
}

TEST_CASE("a failing query is isolated from the rest of the batch") {
  Graph g = two_cliques();
  GnnModel m = random_model(1, 4, 2, 1, 35);

  std::vector<QueryConfig> queries = {plain_query(0), plain_query(3)};
  queries[0].k = 0;  // invalid on purpose
  ParallelConfig pc;
  pc.threads = 2;
  BatchResult br = para_sx(g, m, queries, pc);

  REQUIRE(br.outcomes.size() == 2);
  CHECK_FALSE(br.outcomes[0].ok);
  CHECK(!br.outcomes[0].error.empty());
  CHECK(br.outcomes[1].ok);
  CHECK(br.stats.failed == 1);
}

TEST_CASE("a repeated neighborhood adds zero new estimator entries") {
  Graph g = testutil::star_graph(6, 2);
  rng r(92);
  for (auto& row : g.features)
    for (double& f : row) f = r.next_in(-1.0, 1.0);
  GnnModel m = random_model(2, 4, 2, 1, 36);

  QueryConfig q = plain_query(0);
  EdgeInfoTable table(g.edges.size());
  asx_op(g, m, q, &table);
  uint64_t entries_after_first = table.entries();
  uint64_t hits_after_first = table.hits();
  CHECK(entries_after_first > 0);

  asx_op(g, m, q, &table);  // identical neighborhood on the same thread-table
  CHECK(table.entries() == entries_after_first);
  CHECK(table.hits() > hits_after_first);
}

TEST_CASE("batch queries can mix strategies and diversified mode") {
  Graph g = two_cliques();
  rng r(93);
  for (auto& row : g.features)
    for (double& f : row) f = r.next_in(-1.0, 1.0);
  GnnModel m = random_model(1, 4, 2, 1, 37);

  std::vector<QueryConfig> queries = {plain_query(0), plain_query(4)};
  queries[1].mode = ExplainMode::grow;
  ParallelConfig pc;
  pc.threads = 1;
  BatchResult br = para_sx(g, m, queries, pc);
  REQUIRE(br.outcomes[0].ok);
  REQUIRE(br.outcomes[1].ok);
  CHECK(br.outcomes[0].result.explanation ==
        asx_op(g, m, queries[0]).explanation);
  CHECK(br.outcomes[1].result.explanation ==
        asx_insert(g, m, queries[1]).explanation);

  ParallelConfig div = pc;
  div.diversified = true;
  BatchResult dr = para_sx(g, m, queries, div);
  REQUIRE(dr.outcomes[0].ok);
  CHECK(dr.outcomes[0].result.explanation == dsx(g, m, queries[0]).explanation);
}
