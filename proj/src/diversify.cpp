#include "skyx/diversify.hpp"

#include <algorithm>
#include <stdexcept>

namespace skyx {

double cos_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* zero_vector) {
  if (a.size() != b.size()) throw std::invalid_argument("cos_distance: size mismatch");
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    if (zero_vector) *zero_vector = true;
    return 0.0;
  }
  double c = a.dot(b) / (na * nb);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return 1.0 - c;
}

double node_coverage(const StateGraph& sg, const std::vector<uint32_t>& ids) {
  if (sg.lhop_nodes <= 0) throw std::invalid_argument("node_coverage: neighborhood size unset");
  std::vector<int32_t> all;
  for (uint32_t id : ids) {
    const State& s = sg.states.at(id);
    all.insert(all.end(), s.nodes.begin(), s.nodes.end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return static_cast<double>(all.size()) / static_cast<double>(sg.lhop_nodes);
}

double div_s(const StateGraph& sg, const std::vector<uint32_t>& ids, double alpha,
             bool* zero_seen) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("div_s: alpha must be in [0, 1]");
  if (ids.empty()) return 0.0;
  double pair_sum = 0.0;
  Eigen::VectorXd empty;
  for (size_t i = 0; i < ids.size(); ++i) {
    for (size_t j = i + 1; j < ids.size(); ++j) {
      const State& a = sg.states.at(ids[i]);
      const State& b = sg.states.at(ids[j]);
      const Eigen::VectorXd& ea = a.embedding ? *a.embedding : empty;
      const Eigen::VectorXd& eb = b.embedding ? *b.embedding : empty;
      if (ea.size() == 0 || eb.size() == 0 || ea.size() != eb.size()) {
        if (zero_seen) *zero_seen = true;
        continue;  // distance 0 contributes nothing
      }
      bool zero = false;
      pair_sum += cos_distance(ea, eb, &zero);
      if (zero && zero_seen) *zero_seen = true;
    }
  }
  return alpha * node_coverage(sg, ids) + (1.0 - alpha) * pair_sum;
}

DsxOutcome update_dsx(StateGraph& sg, uint32_t state_id, int k, double eps, double alpha,
                      bool* zero_seen) {
  if (k < 1) throw std::invalid_argument("update_dsx: k must be >= 1");
  sg.k = k;
  sg.eps = eps;

  StateIntegration gate = integrate_verified_state(sg, state_id, eps);

  DsxOutcome out;
  if (!gate.plainly_dominated && !gate.duplicate_phi &&
      sg.explanation.size() < static_cast<size_t>(k)) {
    double current = div_s(sg, sg.explanation, alpha, zero_seen);
    std::vector<uint32_t> with_s = sg.explanation;
    with_s.push_back(state_id);
    double gain = div_s(sg, with_s, alpha, zero_seen) - current;
    double threshold = ((1.0 + eps) / 2.0 - current) /
                       static_cast<double>(k - static_cast<int>(sg.explanation.size()));
    if (gain >= threshold) {
      sg.explanation.push_back(state_id);
      out.admitted = true;
    }
  }
  out.full = sg.explanation.size() == static_cast<size_t>(k);
  return out;
}

namespace {

QueryConfig resolve_layers(const QueryConfig& q, const GnnModel& m) {
  QueryConfig qq = q;
  if (qq.layers == 0) qq.layers = m.layer_count();
  if (qq.layers != m.layer_count())
    throw usage_error("layer override must match the model depth");
  return qq;
}

}  // namespace

ExplainResult dsx(const Graph& g, const GnnModel& m, const QueryConfig& q,
                  EdgeInfoTable* shared_table) {
  QueryConfig qq = resolve_layers(q, m);
  GnnVerifier ev(g, m, qq.node, qq.spec, shared_table);
  return dsx(g, qq, ev);
}

ExplainResult dsx(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev) {
  bool zero_seen = false;
  ExplainResult res = run_explain(g, q, ev, [&](StateGraph& sg, uint32_t sid) {
    return update_dsx(sg, sid, q.k, q.eps, q.alpha, &zero_seen).full;
  });
  res.stats.zero_embedding_seen = zero_seen;
  return res;
}

}  // namespace skyx
