#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "skyx/explain.hpp"
#include "skyx/skyline.hpp"

namespace skyx {

/// Cosine distance 1 - cos(a, b) in [0, 2]. A zero-length input makes the
/// distance 0 and sets *zero_vector when given; callers surface the warning.
double cos_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                    bool* zero_vector = nullptr);

/// Fraction of the anchored neighborhood's nodes touched by the member set.
double node_coverage(const StateGraph& sg, const std::vector<uint32_t>& ids);

/// Diversity score: alpha * coverage + (1 - alpha) * sum of pairwise cosine
/// distances between member embeddings (unordered pairs, arrival order).
/// Members without an embedding count as zero vectors.
double div_s(const StateGraph& sg, const std::vector<uint32_t>& ids, double alpha,
             bool* zero_seen = nullptr);

struct DsxOutcome {
  bool admitted = false;
  bool full = false;  // the explanation reached k; the run stops here
};

/// Diversified streaming update: shares the integration phase and admission
/// gate with update_sx, but grows the set monotonically. A gated newcomer
/// joins only while there is room and its marginal diversity gain clears
/// ((1+eps)/2 - div_s) / (k - |explanation|).
DsxOutcome update_dsx(StateGraph& sg, uint32_t state_id, int k, double eps, double alpha,
                      bool* zero_seen = nullptr);

/// Diversified search in the mode the config selects. Stops as soon as the
/// explanation is full.
ExplainResult dsx(const Graph& g, const GnnModel& m, const QueryConfig& q,
                  EdgeInfoTable* shared_table = nullptr);
ExplainResult dsx(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev);

}  // namespace skyx
