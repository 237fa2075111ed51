#include "skyx/measures.hpp"

#include <algorithm>
#include <cmath>

namespace skyx {

std::string measure_token(Measure m) {
  switch (m) {
    case Measure::fdl_plus: return "fdl+";
    case Measure::fdl_minus: return "fdl-";
    case Measure::conc: return "conc";
    case Measure::acc: return "acc";
  }
  return "?";
}

Measure parse_measure(const std::string& token) {
  if (token == "fdl+") return Measure::fdl_plus;
  if (token == "fdl-") return Measure::fdl_minus;
  if (token == "conc") return Measure::conc;
  if (token == "acc") return Measure::acc;
  throw usage_error("unknown measure token: " + token +
                    " (expected fdl+, fdl-, conc, acc)");
}

MeasureSpec make_measure_spec(const std::vector<std::string>& tokens, ConcRef conc_ref) {
  if (tokens.empty()) throw usage_error("measure spec: at least one measure required");
  MeasureSpec spec;
  spec.conc_ref = conc_ref;
  for (const auto& t : tokens) {
    Measure m = parse_measure(t);
    if (std::find(spec.measures.begin(), spec.measures.end(), m) != spec.measures.end())
      throw usage_error("measure spec: duplicate measure " + t);
    spec.measures.push_back(m);
  }
  return spec;
}

bool is_factual(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s) {
  return predict(m, g, v).label == predict(m, s, v).label;
}

bool is_counterfactual(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s) {
  return predict(m, g, v).label != predict_minus(m, g, s.edge_ids, v).label;
}

double fidelity_plus(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s) {
  Prediction orig = predict(m, g, v);
  Prediction minus = predict_minus(m, g, s.edge_ids, v);
  return orig.prob - minus.probabilities(orig.label);
}

double fidelity_minus(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s) {
  Prediction orig = predict(m, g, v);
  Prediction on = predict(m, s, v);
  return orig.prob - on.probabilities(orig.label);
}

double conciseness(const Subgraph& s, int64_t reference_edges) {
  if (reference_edges <= 0) throw data_error("conciseness: non-positive reference edge count");
  if (static_cast<int64_t>(s.edge_ids.size()) > reference_edges)
    throw data_error("conciseness: candidate larger than its reference");
  return 1.0 - static_cast<double>(s.edge_ids.size()) / static_cast<double>(reference_edges);
}

double accuracy_gt(const Graph& g, const Subgraph& s) {
  int64_t total = 0;
  for (uint8_t f : g.gt) total += f;
  if (total == 0) throw data_error("accuracy: graph carries no ground-truth flags");
  int64_t hit = 0;
  for (int32_t v : s.node_ids())
    if (g.gt[v]) ++hit;
  return static_cast<double>(hit) / static_cast<double>(total);
}

double normalize_measure(Measure m, double raw) {
  double x = raw;
  switch (m) {
    case Measure::fdl_plus: x = (raw + 1.0) / 2.0; break;
    case Measure::fdl_minus: x = 1.0 - (raw + 1.0) / 2.0; break;
    case Measure::conc: break;
    case Measure::acc: break;
  }
  return std::clamp(x, MeasureSpec::floor_delta, 1.0);
}

MeasureVector evaluate_phi(const MeasureSpec& spec, const GnnModel& m, const Graph& g, int32_t v,
                           const Subgraph& s, int64_t reference_edges, RawMeasures* raw) {
  MeasureVector phi;
  phi.reserve(spec.measures.size());
  RawMeasures local;
  local.factual = is_factual(m, g, v, s);
  local.counterfactual = is_counterfactual(m, g, v, s);
  for (Measure mm : spec.measures) {
    double r = 0.0;
    switch (mm) {
      case Measure::fdl_plus: r = fidelity_plus(m, g, v, s); local.fdl_plus = r; break;
      case Measure::fdl_minus: r = fidelity_minus(m, g, v, s); local.fdl_minus = r; break;
      case Measure::conc: r = conciseness(s, reference_edges); local.conc = r; break;
      case Measure::acc: r = accuracy_gt(g, s); local.acc = r; break;
    }
    phi.push_back(normalize_measure(mm, r));
  }
  if (raw) *raw = local;
  return phi;
}

}  // namespace skyx
