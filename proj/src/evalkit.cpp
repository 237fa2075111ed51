#include "skyx/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

#include "skyx/diversify.hpp"

namespace skyx {

namespace {

uint64_t pair_key(int32_t u, int32_t v) {
  if (u > v) std::swap(u, v);
  return (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) |
         static_cast<uint32_t>(v);
}

void finish_synthetic(Graph& g, int64_t plain_n, int32_t plain_label, int motif_size,
                      const std::vector<int32_t>& motif_labels) {
  g.features.assign(static_cast<size_t>(g.n), {1.0});
  g.labels.assign(static_cast<size_t>(g.n), plain_label);
  g.gt.assign(static_cast<size_t>(g.n), 0);
  for (int64_t v = plain_n; v < g.n; ++v) {
    int offset = static_cast<int>((v - plain_n) % motif_size);
    g.labels[static_cast<size_t>(v)] = motif_labels[static_cast<size_t>(offset)];
    g.gt[static_cast<size_t>(v)] = 1;
  }
}

}  // namespace

Graph gen_tree_cycles(int height, int n_motifs, uint64_t seed, int64_t target_edges) {
  if (height < 1) throw usage_error("tree height must be >= 1");
  if (n_motifs < 0) throw usage_error("motif count must be >= 0");
  int64_t tree_n = (int64_t{1} << (height + 1)) - 1;
  int64_t n = tree_n + 6LL * n_motifs;

  std::vector<std::pair<int32_t, int32_t>> edges;
  for (int64_t p = 0; p < tree_n; ++p) {
    int64_t left = 2 * p + 1, right = 2 * p + 2;
    if (left < tree_n)
      edges.emplace_back(static_cast<int32_t>(p), static_cast<int32_t>(left));
    if (right < tree_n)
      edges.emplace_back(static_cast<int32_t>(p), static_cast<int32_t>(right));
  }

  rng attach(derive_seed(seed, 0x7C));
  for (int c = 0; c < n_motifs; ++c) {
    int32_t base = static_cast<int32_t>(tree_n + 6LL * c);
    for (int j = 0; j < 5; ++j) edges.emplace_back(base + j, base + j + 1);
    edges.emplace_back(base, base + 5);
    int32_t t = static_cast<int32_t>(attach.next_below(static_cast<uint64_t>(tree_n)));
    edges.emplace_back(t, base);
  }

  if (target_edges > 0) {
    if (target_edges < static_cast<int64_t>(edges.size()))
      throw usage_error("target edge count is below the construction minimum");
    std::unordered_set<uint64_t> present;
    present.reserve(static_cast<size_t>(target_edges) * 2);
    for (auto [u, v] : edges) present.insert(pair_key(u, v));
    rng noise(derive_seed(seed, 0x7E));
    while (static_cast<int64_t>(edges.size()) < target_edges) {
      int32_t u = static_cast<int32_t>(noise.next_below(static_cast<uint64_t>(n)));
      int32_t v = static_cast<int32_t>(noise.next_below(static_cast<uint64_t>(n)));
      if (u == v) continue;
      if (!present.insert(pair_key(u, v)).second) continue;
      edges.emplace_back(u, v);
    }
  }

  Graph g = make_graph(n, std::move(edges));
  finish_synthetic(g, tree_n, 0, 6, {1, 1, 1, 1, 1, 1});
  return g;
}

Graph gen_ba_shapes(int n_base, int n_motifs, int attach_m, uint64_t seed) {
  if (attach_m < 1 || n_base < attach_m)
    throw usage_error("preferential attachment needs n_base >= attach_m >= 1");
  if (n_motifs < 0) throw usage_error("motif count must be >= 0");
  int64_t n = n_base + 5LL * n_motifs;

  std::vector<std::pair<int32_t, int32_t>> edges;
  rng grow(derive_seed(seed, 0xBA));
  std::vector<int32_t> repeated;  // endpoint multiset, drives the degree bias
  for (int32_t v = attach_m; v < n_base; ++v) {
    std::vector<int32_t> targets;
    if (repeated.empty()) {
      for (int32_t t = 0; t < attach_m; ++t) targets.push_back(t);
    } else {
      while (static_cast<int>(targets.size()) < attach_m) {
        int32_t t = repeated[static_cast<size_t>(grow.next_below(repeated.size()))];
        if (std::find(targets.begin(), targets.end(), t) == targets.end())
          targets.push_back(t);
      }
    }
    for (int32_t t : targets) {
      edges.emplace_back(t, v);
      repeated.push_back(t);
      repeated.push_back(v);
    }
  }

  // Houses: top, two middles, two bottoms; wired to the base by the first
  // bottom node.
  rng attach(derive_seed(seed, 0xA7));
  for (int c = 0; c < n_motifs; ++c) {
    int32_t base = static_cast<int32_t>(n_base + 5LL * c);
    int32_t top = base, m1 = base + 1, m2 = base + 2, b1 = base + 3, b2 = base + 4;
    edges.emplace_back(top, m1);
    edges.emplace_back(top, m2);
    edges.emplace_back(m1, m2);
    edges.emplace_back(m1, b1);
    edges.emplace_back(m2, b2);
    edges.emplace_back(b1, b2);
    int32_t t = static_cast<int32_t>(attach.next_below(static_cast<uint64_t>(n_base)));
    edges.emplace_back(t, b1);
  }

  Graph g = make_graph(n, std::move(edges));
  finish_synthetic(g, n_base, 0, 5, {1, 2, 2, 3, 3});
  return g;
}

std::vector<OracleCandidate> brute_force_space(const Graph& g, const GnnModel& m,
                                               int32_t node, int layers,
                                               const MeasureSpec& spec, int max_edges) {
  if (max_edges < 1 || max_edges > 14)
    throw usage_error("exhaustive edge cap must be in [1, 14]");
  if (spec.measures.empty()) throw usage_error("measure spec must not be empty");
  Subgraph lhop = l_hop_subgraph(g, node, layers);
  int ne = static_cast<int>(lhop.edge_ids.size());
  if (ne > max_edges)
    throw data_error("neighborhood of node " + std::to_string(node) + " has " +
                     std::to_string(ne) + " edges, above the exhaustive cap of " +
                     std::to_string(max_edges));

  InferenceResult full = forward(m, g);
  int64_t ref = spec.conc_ref == ConcRef::lhop ? ne : g.edge_count();

  std::vector<OracleCandidate> space;
  for (uint32_t mask = 1; mask < (1u << ne); ++mask) {
    std::vector<uint32_t> subset;
    for (int b = 0; b < ne; ++b)
      if (mask & (1u << b)) subset.push_back(lhop.edge_ids[static_cast<size_t>(b)]);
    if (!is_connected_with_anchor(g, subset, node)) continue;

    Subgraph s{&g, subset, node};
    OracleCandidate c;
    c.phi = evaluate_phi(spec, m, g, node, s, ref, &c.raw);
    if (!c.raw.factual && !c.raw.counterfactual) continue;
    c.kind = c.raw.factual ? (c.raw.counterfactual ? VerifiedKind::both : VerifiedKind::factual)
                           : VerifiedKind::counterfactual;
    c.nodes = s.node_ids();
    c.edges = std::move(subset);
    c.embedding = Eigen::VectorXd::Zero(full.embeddings.cols());
    for (int32_t v : c.nodes) c.embedding += full.embeddings.row(v).transpose();
    c.embedding /= static_cast<double>(c.nodes.size());
    space.push_back(std::move(c));
  }
  return space;
}

StateGraph oracle_state_graph(const std::vector<OracleCandidate>& space, double eps,
                              int k, int64_t lhop_nodes) {
  StateGraph sg;
  sg.eps = eps;
  sg.k = k;
  sg.lhop_nodes = lhop_nodes;
  for (const OracleCandidate& c : space) {
    State st;
    st.edges = c.edges;
    st.nodes = c.nodes;
    st.kind = c.kind;
    st.phi = c.phi;
    st.raw = c.raw;
    st.embedding = c.embedding;
    uint32_t id = sg.add_state(std::move(st));
    integrate_verified_state(sg, id, eps);
  }
  return sg;
}

OracleBest brute_force_optimal(const StateGraph& sg, int k, OracleObjective objective,
                               double alpha) {
  if (k < 1 || k > 3) throw usage_error("exhaustive subset search allows k in [1, 3]");
  size_t n = sg.zeta.size();
  if (n > 15) throw usage_error("exhaustive subset search allows at most 15 states");

  // valid[i][j]: zeta members i and j may share an explanation (neither
  // plainly dominates the other).
  std::vector<std::vector<bool>> valid(n, std::vector<bool>(n, true));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const MeasureVector& a = sg.at(sg.zeta[i]).phi;
      const MeasureVector& b = sg.at(sg.zeta[j]).phi;
      valid[i][j] = valid[j][i] = !dominates(a, b) && !dominates(b, a);
    }

  OracleBest best;
  std::vector<size_t> picked;
  auto score_of = [&](const std::vector<uint32_t>& ids) {
    return objective == OracleObjective::ds
               ? static_cast<double>(dominance_power(sg, ids))
               : div_s(sg, ids, alpha);
  };
  // Sizes ascending, positions lexicographic; strict improvement keeps the
  // earliest maximizer.
  auto descend = [&](auto&& self, size_t start, int remaining) -> void {
    if (!picked.empty()) {
      std::vector<uint32_t> ids;
      ids.reserve(picked.size());
      for (size_t p : picked) ids.push_back(sg.zeta[p]);
      double sc = score_of(ids);
      if (best.members.empty() || sc > best.score) {
        best.members = ids;
        best.score = sc;
      }
    }
    if (remaining == 0) return;
    for (size_t next = start; next < n; ++next) {
      bool ok = true;
      for (size_t p : picked)
        if (!valid[p][next]) {
          ok = false;
          break;
        }
      if (!ok) continue;
      picked.push_back(next);
      self(self, next + 1, remaining - 1);
      picked.pop_back();
    }
  };
  descend(descend, 0, k);
  return best;
}

namespace {

size_t qi_width(const std::vector<MeasureVector>& vectors, const char* what) {
  if (vectors.empty()) throw usage_error(std::string(what) + " must not be empty");
  size_t w = vectors[0].size();
  if (w == 0) throw usage_error(std::string(what) + " carries empty vectors");
  for (const auto& v : vectors)
    if (v.size() != w)
      throw usage_error(std::string(what) + " carries vectors of mixed length");
  return w;
}

}  // namespace

double nipf(const std::vector<MeasureVector>& members) {
  size_t w = qi_width(members, "explanation");
  double sum = 0.0;
  for (const auto& v : members)
    for (double x : v) sum += x;
  return sum / (static_cast<double>(members.size()) * static_cast<double>(w));
}

double nigd(const std::vector<MeasureVector>& members,
            const std::vector<MeasureVector>& space, int k) {
  size_t w = qi_width(members, "explanation");
  size_t ws = qi_width(space, "universal space");
  if (w != ws) throw usage_error("explanation and space vector lengths differ");
  if (k < 1 || static_cast<size_t>(k) > space.size())
    throw usage_error("reference depth must be in [1, |space|]");

  double total = 0.0;
  for (size_t i = 0; i < w; ++i) {
    std::vector<double> refs;
    refs.reserve(space.size());
    for (const auto& v : space) refs.push_back(v[i]);
    std::sort(refs.begin(), refs.end(), std::greater<double>());
    refs.resize(static_cast<size_t>(k));
    for (double r : refs) {
      double nearest = std::abs(members[0][i] - r);
      for (const auto& v : members) nearest = std::min(nearest, std::abs(v[i] - r));
      total += nearest;
    }
  }
  return total / (static_cast<double>(k) * static_cast<double>(w));
}

MeasureVector nms(const std::vector<MeasureVector>& members,
                  const std::vector<MeasureVector>& space) {
  size_t w = qi_width(members, "explanation");
  size_t ws = qi_width(space, "universal space");
  if (w != ws) throw usage_error("explanation and space vector lengths differ");

  MeasureVector out(w, 0.0);
  for (size_t i = 0; i < w; ++i) {
    double best_member = members[0][i];
    for (const auto& v : members) best_member = std::max(best_member, v[i]);
    double best_space = space[0][i];
    for (const auto& v : space) best_space = std::max(best_space, v[i]);
    if (best_space <= 0.0)
      throw usage_error("space best value must be positive for the ratio");
    out[i] = best_member / best_space;
  }
  return out;
}

}  // namespace skyx
