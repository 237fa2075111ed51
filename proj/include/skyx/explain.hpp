#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"
#include "skyx/measures.hpp"
#include "skyx/skyline.hpp"

namespace skyx {

enum class ExplainMode { peel, grow };

/// CLI strategy tokens: "op" (onion peeling) and "insert" (edge growth).
std::string explain_mode_token(ExplainMode m);
ExplainMode parse_explain_mode(const std::string& token);

/// One query against one anchored node. `layers` bounds the neighborhood; 0
/// means "use the model depth". `budget` caps verifier invocations, 0 means
/// unlimited. `monotone` lists the measures the caller asserts never improve
/// along an edge removal; pruning stays off unless every spec measure is
/// listed.
struct QueryConfig {
  int32_t node = -1;
  int k = 3;
  double eps = 0.1;
  int64_t budget = 0;
  int layers = 0;
  ExplainMode mode = ExplainMode::peel;
  MeasureSpec spec;
  bool prioritize = true;
  bool prune = false;
  std::vector<Measure> monotone = {Measure::conc};
  double alpha = 0.5;  // diversified runs: coverage weight in the diversity score
};

/// Verdict of one verifier invocation. `kind == none` marks a candidate that
/// is neither factual nor counterfactual; its coordinates are still reported
/// for diagnostics but it never enters the verified stream.
struct Verification {
  VerifiedKind kind = VerifiedKind::none;
  MeasureVector phi;  // normalized, spec order
  RawMeasures raw;
  Eigen::VectorXd embedding;  // candidate embedding for diversity scoring
};

/// Evaluation seam between the search drivers and the model. The concrete
/// implementation runs GNN inference; tests substitute scripted outcomes.
class CandidateEvaluator {
 public:
  virtual ~CandidateEvaluator() = default;

  /// Verify one candidate edge set (parent-graph edge ids, sorted). Counts as
  /// exactly one budget unit.
  virtual Verification evaluate(const std::vector<uint32_t>& edges) = 0;

  /// Static estimate of the phi loss caused by removing `edge` from a
  /// candidate, averaged over the spec measures. Lower means cheaper to
  /// remove. Insertion ranking uses the negated value.
  virtual double removal_estimate(uint32_t edge) = 0;
};

/// Per-thread cache of per-edge estimator costs, keyed by parent-graph edge
/// id. Entries are pure functions of the fixed input graph, so sharing the
/// table across queries on one thread only skips recomputation, never changes
/// a value. Not synchronized; never hand one table to two threads.
class EdgeInfoTable {
 public:
  explicit EdgeInfoTable(size_t edge_count);

  bool lookup(uint32_t edge, double* out) const;
  void store(uint32_t edge, double value);
  uint64_t hits() const;
  uint64_t entries() const;

 private:
  std::vector<double> value_;
  std::vector<uint8_t> known_;
  mutable uint64_t hits_ = 0;
};

/// Model-backed evaluator for one anchored query. Precomputes the L-hop
/// context once; each evaluate() runs two bounded forward passes (candidate
/// alone, graph minus candidate) whose anchored-row outputs match full-graph
/// inference exactly.
class GnnVerifier : public CandidateEvaluator {
 public:
  GnnVerifier(const Graph& g, const GnnModel& m, int32_t node, const MeasureSpec& spec,
              EdgeInfoTable* shared_table = nullptr);

  Verification evaluate(const std::vector<uint32_t>& edges) override;
  double removal_estimate(uint32_t edge) override;

  const Subgraph& lhop() const { return lhop_; }
  int64_t reference_edges() const { return reference_edges_; }
  const Prediction& base() const { return base_; }
  uint64_t estimator_cache_hits() const { return cache_hits_; }

 private:
  double edge_cost(uint32_t edge);

  const Graph& g_;
  const GnnModel& m_;
  int32_t node_;
  MeasureSpec spec_;
  Subgraph lhop_;
  std::vector<int32_t> local_nodes_;            // sorted parent ids
  std::unordered_map<int32_t, int32_t> to_local_;
  std::vector<double> full_aug_deg_;            // per local node, parent degree + 1
  Eigen::MatrixXd x_local_;
  Eigen::MatrixXd emb_local_;                   // full-graph final-layer rows
  Prediction base_;
  int64_t reference_edges_ = 0;
  int64_t gt_total_ = 0;
  EdgeInfoTable* shared_table_ = nullptr;
  std::unordered_map<uint32_t, double> local_costs_;
  uint64_t cache_hits_ = 0;
};

/// Pruning test: every component of the candidate's upper bound lies within
/// the (1+eps) slack of the ancestor's verified coordinates.
bool early_prune(const MeasureVector& ancestor_phi, const MeasureVector& candidate_upper,
                 double eps);

struct ExplainStats {
  int64_t verifier_calls = 0;
  int64_t verified = 0;
  int64_t rejected = 0;
  int64_t skipped_illegal = 0;
  int64_t pruned_count = 0;
  int64_t rounds = 0;
  int64_t commits = 0;
  bool budget_exhausted = false;
  bool stopped_by_updater = false;
  bool zero_embedding_seen = false;  // a diversity pair hit a zero-length embedding
  std::vector<std::pair<uint32_t, uint32_t>> pruned;  // (ancestor state, candidate state)
};

struct ExplainResult {
  StateGraph sg;
  std::vector<uint32_t> explanation;  // state ids, arrival order
  ExplainStats stats;
};

/// Integration hook applied to each newly verified state. Returns true to
/// stop the whole run (used by the diversified variant once it fills up).
using StateUpdater = std::function<bool(StateGraph&, uint32_t)>;

/// Core search driver; mode comes from the config. Both modes share the
/// round structure: spawn single-edge edits of the current state in edge-id
/// order, verify what the budget allows, hand verified states to `updater`,
/// then commit one edit and repeat.
ExplainResult run_explain(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev,
                          const StateUpdater& updater);

/// Onion-peeling search with the bounded skyline updater. The overload
/// without an evaluator builds a GnnVerifier internally.
ExplainResult asx_op(const Graph& g, const GnnModel& m, const QueryConfig& q,
                     EdgeInfoTable* shared_table = nullptr);
ExplainResult asx_op(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev);

/// Edge-growing search from the bare anchor, same updater.
ExplainResult asx_insert(const Graph& g, const GnnModel& m, const QueryConfig& q,
                         EdgeInfoTable* shared_table = nullptr);
ExplainResult asx_insert(const Graph& g, const QueryConfig& q, CandidateEvaluator& ev);

}  // namespace skyx
