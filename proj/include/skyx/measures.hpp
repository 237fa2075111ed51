#pragma once

#include <optional>
#include <string>
#include <vector>

#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"

namespace skyx {

enum class Measure { fdl_plus, fdl_minus, conc, acc };

/// CLI token for a measure: fdl+, fdl-, conc, acc.
std::string measure_token(Measure m);
Measure parse_measure(const std::string& token);

/// Which reference edge count conciseness divides by.
enum class ConcRef { lhop, graph };

/// Ordered, duplicate-free list of 1..4 measures plus the conciseness
/// reference choice. `floor_delta` is the lower clamp applied after
/// normalization so every coordinate lands in (0, 1].
struct MeasureSpec {
  std::vector<Measure> measures;
  ConcRef conc_ref = ConcRef::lhop;
  static constexpr double floor_delta = 1e-9;

  size_t size() const { return measures.size(); }
};

MeasureSpec make_measure_spec(const std::vector<std::string>& tokens,
                              ConcRef conc_ref = ConcRef::lhop);

using MeasureVector = std::vector<double>;

/// Raw (pre-normalization) measure values alongside the verification facts.
struct RawMeasures {
  bool factual = false;
  bool counterfactual = false;
  std::optional<double> fdl_plus;   // in [-1, 1]
  std::optional<double> fdl_minus;  // in [-1, 1]
  std::optional<double> conc;       // in [0, 1)
  std::optional<double> acc;        // in [0, 1]
};

/// True when the candidate preserves the anchored node's prediction.
bool is_factual(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s);

/// True when deleting the candidate's edges from the graph flips the anchored
/// node's prediction. An anchor isolated by the deletion is evaluated on
/// self-loop-only propagation.
bool is_counterfactual(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s);

double fidelity_plus(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s);
double fidelity_minus(const GnnModel& m, const Graph& g, int32_t v, const Subgraph& s);

/// 1 - |E(candidate)| / reference. Pre: 0 < |E(candidate)| <= reference.
double conciseness(const Subgraph& s, int64_t reference_edges);

/// |nodes(candidate) ∩ gt| / |gt|. Pre: the graph has ground-truth flags.
double accuracy_gt(const Graph& g, const Subgraph& s);

/// Map a raw measure value to (0, 1], orientation "higher is better":
/// fdl+ -> (x+1)/2, fdl- -> 1-(x+1)/2, conc and acc kept, then clamp to
/// [floor_delta, 1].
double normalize_measure(Measure m, double raw);

/// Evaluate the spec's measures of a candidate through the reference
/// (full-inference) path. `reference_edges` feeds conciseness; pass the
/// L-hop edge count for ConcRef::lhop, |E(G)| for ConcRef::graph.
MeasureVector evaluate_phi(const MeasureSpec& spec, const GnnModel& m, const Graph& g, int32_t v,
                           const Subgraph& s, int64_t reference_edges, RawMeasures* raw = nullptr);

}  // namespace skyx
