#include "skyx/explain.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace skyx {

std::string explain_mode_token(ExplainMode m) {
  return m == ExplainMode::peel ? "op" : "insert";
}

ExplainMode parse_explain_mode(const std::string& token) {
  if (token == "op") return ExplainMode::peel;
  if (token == "insert") return ExplainMode::grow;
  throw usage_error("unknown strategy '" + token + "' (expected op or insert)");
}

EdgeInfoTable::EdgeInfoTable(size_t edge_count)
    : value_(edge_count, 0.0), known_(edge_count, 0) {}

bool EdgeInfoTable::lookup(uint32_t edge, double* out) const {
  if (edge >= known_.size() || !known_[edge]) return false;
  *out = value_[edge];
  ++hits_;
  return true;
}

void EdgeInfoTable::store(uint32_t edge, double value) {
  if (edge >= known_.size()) return;
  value_[edge] = value;
  known_[edge] = 1;
}

uint64_t EdgeInfoTable::hits() const { return hits_; }

uint64_t EdgeInfoTable::entries() const {
  uint64_t n = 0;
  for (uint8_t k : known_) n += k;
  return n;
}

namespace {

std::vector<int32_t> endpoint_set(const Graph& g, const std::vector<uint32_t>& edges) {
  std::vector<int32_t> nodes;
  nodes.reserve(edges.size() * 2);
  for (uint32_t eid : edges) {
    nodes.push_back(g.edges[eid].first);
    nodes.push_back(g.edges[eid].second);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

int32_t argmax_low(const Eigen::VectorXd& p) {
  int32_t best = 0;
  for (Eigen::Index c = 1; c < p.size(); ++c)
    if (p(c) > p(best)) best = static_cast<int32_t>(c);
  return best;
}

}  // namespace

GnnVerifier::GnnVerifier(const Graph& g, const GnnModel& m, int32_t node,
                         const MeasureSpec& spec, EdgeInfoTable* shared_table)
    : g_(g),
      m_(m),
      node_(node),
      spec_(spec),
      lhop_(l_hop_subgraph(g, node, m.layer_count())),
      shared_table_(shared_table) {
  validate_model(m);
  if (g.feature_dim() != m.input_dim())
    throw data_error("verifier: feature dim does not match model input dim");
  if (spec_.measures.empty()) throw usage_error("verifier: empty measure spec");

  local_nodes_ = lhop_.node_ids();
  to_local_.reserve(local_nodes_.size() * 2);
  for (size_t i = 0; i < local_nodes_.size(); ++i)
    to_local_[local_nodes_[i]] = static_cast<int32_t>(i);

  full_aug_deg_.resize(local_nodes_.size());
  for (size_t i = 0; i < local_nodes_.size(); ++i)
    full_aug_deg_[i] = static_cast<double>(g.degree(local_nodes_[i])) + 1.0;

  x_local_.resize(static_cast<Eigen::Index>(local_nodes_.size()), g.feature_dim());
  for (size_t i = 0; i < local_nodes_.size(); ++i)
    for (int j = 0; j < g.feature_dim(); ++j)
      x_local_(static_cast<Eigen::Index>(i), j) = g.features[local_nodes_[i]][j];

  InferenceResult full = forward(m, g);
  emb_local_.resize(static_cast<Eigen::Index>(local_nodes_.size()), full.embeddings.cols());
  for (size_t i = 0; i < local_nodes_.size(); ++i)
    emb_local_.row(static_cast<Eigen::Index>(i)) = full.embeddings.row(local_nodes_[i]);
  base_.label = full.predicted[node];
  base_.probabilities = full.probabilities.row(node);
  base_.prob = base_.probabilities(base_.label);

  reference_edges_ = spec_.conc_ref == ConcRef::lhop
                         ? static_cast<int64_t>(lhop_.edge_ids.size())
                         : g.edge_count();
  for (uint8_t f : g.gt) gt_total_ += f;
  bool wants_acc = std::find(spec_.measures.begin(), spec_.measures.end(), Measure::acc) !=
                   spec_.measures.end();
  if (wants_acc && gt_total_ == 0)
    throw data_error("verifier: accuracy measure needs ground-truth flags");
}

double GnnVerifier::edge_cost(uint32_t edge) {
  auto it = local_costs_.find(edge);
  if (it != local_costs_.end()) {
    ++cache_hits_;
    return it->second;
  }
  double c = 0.0;
  if (shared_table_ && shared_table_->lookup(edge, &c)) {
    ++cache_hits_;
    local_costs_.emplace(edge, c);
    return c;
  }
  auto [u, w] = g_.edges[edge];
  double nu = 0.0, nw = 0.0;
  for (double f : g_.features[u]) nu += f * f;
  for (double f : g_.features[w]) nw += f * f;
  double du = static_cast<double>(g_.degree(u)) + 1.0;
  double dw = static_cast<double>(g_.degree(w)) + 1.0;
  c = (std::sqrt(nu) + std::sqrt(nw)) / std::sqrt(du * dw);
  local_costs_.emplace(edge, c);
  if (shared_table_) shared_table_->store(edge, c);
  return c;
}

double GnnVerifier::removal_estimate(uint32_t edge) {
  if (edge >= g_.edges.size()) throw std::out_of_range("removal_estimate: unknown edge");
  double c = edge_cost(edge);
  double sum = 0.0;
  for (Measure ms : spec_.measures) {
    switch (ms) {
      case Measure::conc:
        sum += -1.0 / static_cast<double>(reference_edges_);
        break;
      case Measure::fdl_plus:
      case Measure::fdl_minus:
        sum += c;
        break;
      case Measure::acc: {
        auto [u, w] = g_.edges[edge];
        double overlap = static_cast<double>((g_.gt[u] ? 1 : 0) + (g_.gt[w] ? 1 : 0));
        sum += overlap / static_cast<double>(gt_total_);
        break;
      }
    }
  }
  return sum / static_cast<double>(spec_.measures.size());
}

Verification GnnVerifier::evaluate(const std::vector<uint32_t>& edges) {
  if (edges.empty()) throw data_error("verifier: empty candidate");
  if (!std::is_sorted(edges.begin(), edges.end()))
    throw data_error("verifier: candidate edges must be sorted");
  for (uint32_t eid : edges)
    if (!std::binary_search(lhop_.edge_ids.begin(), lhop_.edge_ids.end(), eid))
      throw data_error("verifier: candidate edge outside the anchored neighborhood");
  if (!is_connected_with_anchor(g_, edges, node_))
    throw data_error("verifier: candidate not connected through the anchor");

  // Factual pass: the candidate subgraph on its own.
  Subgraph cand;
  cand.parent = &g_;
  cand.edge_ids = edges;
  cand.anchor = node_;
  Prediction pf = predict(m_, cand, node_);
  bool factual = pf.label == base_.label;
  double p_fact = pf.probabilities(base_.label);

  // Counterfactual pass: neighborhood structure minus the candidate, with
  // degrees carried over from the full graph so the anchored row reproduces
  // whole-graph inference on G minus the candidate.
  const auto nn = static_cast<Eigen::Index>(local_nodes_.size());
  std::vector<double> deg = full_aug_deg_;
  for (uint32_t eid : edges) {
    deg[to_local_.at(g_.edges[eid].first)] -= 1.0;
    deg[to_local_.at(g_.edges[eid].second)] -= 1.0;
  }
  int32_t vl = to_local_.at(node_);
  Eigen::VectorXd p_cf_row;
  int32_t cf_label;
  if (deg[vl] == 1.0) {
    // Candidate strips every edge at the anchor; take the same self-loop
    // route the plain deletion pass takes so the two agree bit for bit.
    Prediction mp = predict_minus(m_, g_, edges, node_);
    p_cf_row = mp.probabilities;
    cf_label = mp.label;
  } else {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(lhop_.edge_ids.size() * 2 + static_cast<size_t>(nn));
    for (Eigen::Index i = 0; i < nn; ++i) trips.emplace_back(i, i, 1.0 / deg[i]);
    size_t ri = 0;
    for (uint32_t eid : lhop_.edge_ids) {
      while (ri < edges.size() && edges[ri] < eid) ++ri;
      if (ri < edges.size() && edges[ri] == eid) continue;  // removed
      int32_t lu = to_local_.at(g_.edges[eid].first);
      int32_t lv = to_local_.at(g_.edges[eid].second);
      double w = 1.0 / std::sqrt(deg[lu] * deg[lv]);
      trips.emplace_back(lu, lv, w);
      trips.emplace_back(lv, lu, w);
    }
    Eigen::SparseMatrix<double> a(nn, nn);
    a.setFromTriplets(trips.begin(), trips.end());
    Eigen::MatrixXd h = x_local_;
    int L = m_.layer_count();
    for (int l = 0; l < L; ++l) {
      h = a * (h * m_.weights[l]);
      if (l + 1 < L) h = h.cwiseMax(0.0);
    }
    p_cf_row = softmax_row(h.row(vl));
    cf_label = argmax_low(p_cf_row);
  }
  bool counterfactual = cf_label != base_.label;
  double p_cf = p_cf_row(base_.label);

  Verification ver;
  ver.raw.factual = factual;
  ver.raw.counterfactual = counterfactual;
  ver.raw.fdl_plus = base_.prob - p_cf;
  ver.raw.fdl_minus = base_.prob - p_fact;
  ver.raw.conc = 1.0 - static_cast<double>(edges.size()) / static_cast<double>(reference_edges_);
  if (factual && counterfactual)
    ver.kind = VerifiedKind::both;
  else if (factual)
    ver.kind = VerifiedKind::factual;
  else if (counterfactual)
    ver.kind = VerifiedKind::counterfactual;

  std::vector<int32_t> cand_nodes = endpoint_set(g_, edges);
  bool wants_acc = std::find(spec_.measures.begin(), spec_.measures.end(), Measure::acc) !=
                   spec_.measures.end();
  if (wants_acc) {
    int64_t overlap = 0;
    for (int32_t v : cand_nodes) overlap += g_.gt[v] ? 1 : 0;
    ver.raw.acc = static_cast<double>(overlap) / static_cast<double>(gt_total_);
  }

  ver.phi.resize(spec_.measures.size());
  for (size_t i = 0; i < spec_.measures.size(); ++i) {
    double raw = 0.0;
    switch (spec_.measures[i]) {
      case Measure::fdl_plus: raw = *ver.raw.fdl_plus; break;
      case Measure::fdl_minus: raw = *ver.raw.fdl_minus; break;
      case Measure::conc: raw = *ver.raw.conc; break;
      case Measure::acc: raw = *ver.raw.acc; break;
    }
    ver.phi[i] = normalize_measure(spec_.measures[i], raw);
  }

  ver.embedding = Eigen::VectorXd::Zero(emb_local_.cols());
  for (int32_t v : cand_nodes) ver.embedding += emb_local_.row(to_local_.at(v)).transpose();
  ver.embedding /= static_cast<double>(cand_nodes.size());
  return ver;
}

bool early_prune(const MeasureVector& ancestor_phi, const MeasureVector& candidate_upper,
                 double eps) {
  if (ancestor_phi.size() != candidate_upper.size() || ancestor_phi.empty())
    throw std::invalid_argument("early_prune needs equal-length non-empty vectors");
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  for (size_t i = 0; i < ancestor_phi.size(); ++i)
    if (candidate_upper[i] > (1.0 + eps) * ancestor_phi[i]) return false;
  return true;
}

namespace {

struct RunCtx {
  const Graph& g;
  const QueryConfig& q;
  CandidateEvaluator& ev;
  const StateUpdater& updater;
  const Subgraph& lhop;
  int64_t reference_edges;
  bool prune_active;
  ExplainResult& res;
};

std::vector<uint32_t> without_edge(const std::vector<uint32_t>& edges, uint32_t eid) {
  std::vector<uint32_t> out;
  out.reserve(edges.size() - 1);
  for (uint32_t e : edges)
    if (e != eid) out.push_back(e);
  return out;
}

uint32_t record_candidate(RunCtx& c, std::vector<uint32_t> cand, uint32_t parent,
                          uint32_t edit_edge, bool insert, const Verification* ver) {
  State s;
  s.edges = std::move(cand);
  s.nodes = endpoint_set(c.g, s.edges);
  s.parent = parent;
  s.edit_edge = edit_edge;
  s.edit_insert = insert;
  if (ver) {
    s.kind = ver->kind;
    if (ver->kind != VerifiedKind::none) {
      s.phi = ver->phi;
      s.raw = ver->raw;
      if (ver->embedding.size() > 0) s.embedding = ver->embedding;
    }
  }
  return c.res.sg.add_state(std::move(s));
}

// Candidate upper bound per measure: conciseness is exact from the candidate
// size, every other (caller-flagged monotone) measure is bounded by the
// ancestor's value.
MeasureVector prune_upper(const MeasureSpec& spec, const MeasureVector& ancestor_phi,
                          size_t cand_edges, int64_t reference_edges) {
  MeasureVector upper(spec.measures.size());
  for (size_t i = 0; i < spec.measures.size(); ++i) {
    if (spec.measures[i] == Measure::conc) {
      double raw = 1.0 - static_cast<double>(cand_edges) / static_cast<double>(reference_edges);
      upper[i] = normalize_measure(Measure::conc, raw);
    } else {
      upper[i] = ancestor_phi[i];
    }
  }
  return upper;
}

void run_peel(RunCtx& c) {
  StateGraph& sg = c.res.sg;
  ExplainStats& st = c.res.stats;
  const int L = c.q.layers;

  std::vector<int32_t> dist = bfs_distances(c.g, c.q.node, L);
  std::vector<std::vector<uint32_t>> layer_edges(static_cast<size_t>(L) + 1);
  for (uint32_t eid : c.lhop.edge_ids) {
    auto [u, w] = c.g.edges[eid];
    int layer = std::max(dist[u], dist[w]);
    layer_edges[static_cast<size_t>(layer)].push_back(eid);
  }

  std::vector<uint32_t> cur = c.lhop.edge_ids;
  State root;
  root.edges = cur;
  root.nodes = c.lhop.node_ids();
  root.is_root = true;
  uint32_t cur_sid = sg.add_state(std::move(root));
  bool cur_verified = false;
  MeasureVector cur_phi;

  for (int l = L; l >= 1; --l) {
    std::vector<uint32_t>& active = layer_edges[static_cast<size_t>(l)];
    while (!active.empty()) {
      ++st.rounds;
      std::vector<std::pair<uint32_t, uint32_t>> round_verified;  // (state, edge)
      for (uint32_t eid : active) {
        std::vector<uint32_t> cand = without_edge(cur, eid);
        if (cand.empty() || !is_connected_with_anchor(c.g, cand, c.q.node)) {
          ++st.skipped_illegal;
          continue;
        }
        if (c.prune_active && cur_verified) {
          MeasureVector upper = prune_upper(c.q.spec, cur_phi, cand.size(), c.reference_edges);
          if (early_prune(cur_phi, upper, c.q.eps)) {
            uint32_t sid = record_candidate(c, std::move(cand), cur_sid, eid, false, nullptr);
            st.pruned.emplace_back(cur_sid, sid);
            ++st.pruned_count;
            continue;
          }
        }
        if (c.q.budget > 0 && st.verifier_calls >= c.q.budget) {
          st.budget_exhausted = true;
          return;
        }
        ++st.verifier_calls;
        Verification ver = c.ev.evaluate(cand);
        uint32_t sid = record_candidate(c, std::move(cand), cur_sid, eid, false, &ver);
        if (ver.kind != VerifiedKind::none) {
          ++st.verified;
          bool stop = c.updater(sg, sid);
          round_verified.emplace_back(sid, eid);
          if (stop) {
            st.stopped_by_updater = true;
            return;
          }
        } else {
          ++st.rejected;
        }
      }
      if (round_verified.empty()) break;  // nothing verifiable left in this layer

      std::pair<uint32_t, uint32_t> best = round_verified.front();
      if (c.q.prioritize) {
        double best_cost = c.ev.removal_estimate(best.second);
        for (size_t i = 1; i < round_verified.size(); ++i) {
          double cost = c.ev.removal_estimate(round_verified[i].second);
          if (cost < best_cost) {
            best = round_verified[i];
            best_cost = cost;
          }
        }
      }
      cur = without_edge(cur, best.second);
      active.erase(std::remove(active.begin(), active.end(), best.second), active.end());
      cur_sid = best.first;
      cur_verified = true;
      cur_phi = sg.at(best.first).phi;
      ++st.commits;
    }
  }
}

void run_grow(RunCtx& c) {
  StateGraph& sg = c.res.sg;
  ExplainStats& st = c.res.stats;

  std::vector<char> in_cur(c.g.edges.size(), 0);
  std::vector<char> node_in_cur(static_cast<size_t>(c.g.n), 0);
  node_in_cur[c.q.node] = 1;
  std::vector<uint32_t> cur;

  State root;
  root.nodes = {c.q.node};
  root.is_root = true;
  uint32_t cur_sid = sg.add_state(std::move(root));

  while (cur.size() < c.lhop.edge_ids.size()) {
    std::vector<uint32_t> frontier;
    for (uint32_t eid : c.lhop.edge_ids) {
      if (in_cur[eid]) continue;
      auto [u, w] = c.g.edges[eid];
      if (node_in_cur[u] || node_in_cur[w]) frontier.push_back(eid);
    }
    if (frontier.empty()) break;
    ++st.rounds;

    std::vector<std::pair<uint32_t, uint32_t>> spawned;  // (state, edge)
    for (uint32_t eid : frontier) {
      std::vector<uint32_t> cand = cur;
      cand.insert(std::upper_bound(cand.begin(), cand.end(), eid), eid);
      if (c.q.budget > 0 && st.verifier_calls >= c.q.budget) {
        st.budget_exhausted = true;
        return;
      }
      ++st.verifier_calls;
      Verification ver = c.ev.evaluate(cand);
      uint32_t sid = record_candidate(c, std::move(cand), cur_sid, eid, true, &ver);
      spawned.emplace_back(sid, eid);
      if (ver.kind != VerifiedKind::none) {
        ++st.verified;
        bool stop = c.updater(sg, sid);
        if (stop) {
          st.stopped_by_updater = true;
          return;
        }
      } else {
        ++st.rejected;
      }
    }

    // Growth never stalls: the committed edge is the best ranked spawn,
    // verified or not.
    std::pair<uint32_t, uint32_t> best = spawned.front();
    if (c.q.prioritize) {
      double best_gain = c.ev.removal_estimate(best.second);
      for (size_t i = 1; i < spawned.size(); ++i) {
        double gain = c.ev.removal_estimate(spawned[i].second);
        if (gain > best_gain) {
          best = spawned[i];
          best_gain = gain;
        }
      }
    }
    in_cur[best.second] = 1;
    cur.insert(std::upper_bound(cur.begin(), cur.end(), best.second), best.second);
    node_in_cur[c.g.edges[best.second].first] = 1;
    node_in_cur[c.g.edges[best.second].second] = 1;
    cur_sid = best.first;
    ++st.commits;
  }
}

}  // namespace

ExplainResult run_explain(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev,
                          const StateUpdater& updater) {
  if (q.node < 0 || q.node >= g.n) throw data_error("query node out of range");
  if (q.k < 1) throw usage_error("k must be >= 1");
  if (q.eps < 0.0) throw usage_error("eps must be >= 0");
  if (q.budget < 0) throw usage_error("budget must be >= 0");
  if (q.layers < 1) throw usage_error("query needs a positive layer count");
  if (q.spec.measures.empty()) throw usage_error("query needs at least one measure");
  if (!updater) throw usage_error("query needs a state updater");

  Subgraph lhop = l_hop_subgraph(g, q.node, q.layers);
  ExplainResult res;
  res.sg.eps = q.eps;
  res.sg.k = q.k;
  res.sg.lhop_nodes = static_cast<int64_t>(lhop.node_ids().size());

  bool all_monotone = true;
  for (Measure ms : q.spec.measures)
    if (std::find(q.monotone.begin(), q.monotone.end(), ms) == q.monotone.end())
      all_monotone = false;
  int64_t ref = q.spec.conc_ref == ConcRef::lhop ? static_cast<int64_t>(lhop.edge_ids.size())
                                                 : g.edge_count();

  RunCtx ctx{g,    q,
             ev,   updater,
             lhop, ref,
             q.prune && all_monotone && q.mode == ExplainMode::peel, res};
  if (q.mode == ExplainMode::peel)
    run_peel(ctx);
  else
    run_grow(ctx);

  res.explanation = res.sg.explanation;
  return res;
}

namespace {

StateUpdater skyline_updater(int k, double eps) {
  return [k, eps](StateGraph& sg, uint32_t sid) {
    update_sx(sg, sid, k, eps);
    return false;
  };
}

QueryConfig with_mode(const QueryConfig& q, ExplainMode mode, const GnnModel* m) {
  QueryConfig qq = q;
  qq.mode = mode;
  if (m) {
    if (qq.layers == 0) qq.layers = m->layer_count();
    if (qq.layers != m->layer_count())
      throw usage_error("layer override must match the model depth");
  }
  return qq;
}

}  // namespace

ExplainResult asx_op(const Graph& g, const GnnModel& m, const QueryConfig& q,
                     EdgeInfoTable* shared_table) {
  QueryConfig qq = with_mode(q, ExplainMode::peel, &m);
  GnnVerifier ev(g, m, qq.node, qq.spec, shared_table);
  return run_explain(g, qq, ev, skyline_updater(qq.k, qq.eps));
}

ExplainResult asx_op(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev) {
  QueryConfig qq = with_mode(q, ExplainMode::peel, nullptr);
  return run_explain(g, qq, ev, skyline_updater(qq.k, qq.eps));
}

ExplainResult asx_insert(const Graph& g, const GnnModel& m, const QueryConfig& q,
                         EdgeInfoTable* shared_table) {
  QueryConfig qq = with_mode(q, ExplainMode::grow, &m);
  GnnVerifier ev(g, m, qq.node, qq.spec, shared_table);
  return run_explain(g, qq, ev, skyline_updater(qq.k, qq.eps));
}

ExplainResult asx_insert(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev) {
  QueryConfig qq = with_mode(q, ExplainMode::grow, nullptr);
  return run_explain(g, qq, ev, skyline_updater(qq.k, qq.eps));
}

}  // namespace skyx
