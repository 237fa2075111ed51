#pragma once

#include <cstdint>
#include <vector>

#include "skyx/gnn.hpp"
#include "skyx/graph.hpp"
#include "skyx/measures.hpp"
#include "skyx/skyline.hpp"

namespace skyx {

/// Balanced binary tree of the given height plus `n_motifs` six-node cycles,
/// each wired to a uniformly chosen tree node. Labels: 0 tree, 1 cycle; cycle
/// nodes carry the ground-truth flag. Every node gets the constant feature
/// [1.0]. `target_edges` > 0 pads the graph with random non-duplicate noise
/// edges up to that many total; labels and flags are unaffected.
Graph gen_tree_cycles(int height = 8, int n_motifs = 80, uint64_t seed = 1,
                      int64_t target_edges = 0);

/// Preferential-attachment base graph plus `n_motifs` five-node house motifs,
/// each wired to a uniformly chosen base node through its first bottom node.
/// Labels: 0 outside, 1 top, 2 middle, 3 bottom; house nodes carry the
/// ground-truth flag. Constant feature [1.0].
Graph gen_ba_shapes(int n_base = 300, int n_motifs = 80, int attach_m = 5,
                    uint64_t seed = 1);

/// One exhaustively verified candidate: coordinates computed through the
/// reference inference path, embedding through the full-graph forward pass.
struct OracleCandidate {
  std::vector<uint32_t> edges;  // parent edge ids, sorted
  std::vector<int32_t> nodes;   // endpoint set, sorted
  VerifiedKind kind = VerifiedKind::none;
  MeasureVector phi;
  RawMeasures raw;
  Eigen::VectorXd embedding;
};

/// Enumerate every connected anchored non-empty edge subset of the L-hop
/// neighborhood and keep those verifying factual or counterfactual. Subsets
/// appear in ascending bitmask order over the neighborhood's sorted edge
/// list. Refuses neighborhoods above `max_edges` (hard cap 14).
std::vector<OracleCandidate> brute_force_space(const Graph& g, const GnnModel& m,
                                               int32_t node, int layers,
                                               const MeasureSpec& spec,
                                               int max_edges = 14);

/// Load a verified space into a StateGraph (arrival order = space order) so
/// the oracle searches and the streaming updaters score the same structures.
StateGraph oracle_state_graph(const std::vector<OracleCandidate>& space, double eps,
                              int k, int64_t lhop_nodes);

enum class OracleObjective { ds, divs };

struct OracleBest {
  std::vector<uint32_t> members;  // state ids, ascending
  double score = 0.0;
};

/// Exhaustive search over all subsets of the verified stream of size 1..k
/// whose members are pairwise plainly non-dominated, maximizing union
/// dominance power or the diversity score. Refuses |zeta| > 15 or k > 3.
/// Ties keep the first subset in enumeration order (size, then lexicographic
/// by arrival index).
OracleBest brute_force_optimal(const StateGraph& sg, int k, OracleObjective objective,
                               double alpha = 0.5);

/// Mean normalized measure value over an explanation's members; errors on an
/// empty member list.
double nipf(const std::vector<MeasureVector>& members);

/// Mean, over each measure's top-k reference values in the universal space,
/// of the distance from the reference value to the nearest member value of
/// that measure. Errors on empty members or k outside [1, |space|].
double nigd(const std::vector<MeasureVector>& members,
            const std::vector<MeasureVector>& space, int k);

/// Per-measure ratio of the explanation's best value to the space's best
/// value. Members must be drawn from the space for the ratio to stay <= 1.
MeasureVector nms(const std::vector<MeasureVector>& members,
                  const std::vector<MeasureVector>& space);

}  // namespace skyx
