#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "skyx/common.hpp"
#include "skyx/measures.hpp"

namespace skyx {

/// True when b dominates a: b >= a componentwise and b > a in at least one
/// component. Both vectors must have equal length.
bool dominates(const MeasureVector& a, const MeasureVector& b);

/// eps-dominance: a <= (1+eps)*b componentwise AND a <= b in at least one
/// component. At eps = 0 this is weak componentwise dominance.
bool eps_dominates(const MeasureVector& a, const MeasureVector& b, double eps);

/// Per-component log-grid cell index floor(log_{1+eps} value). Values must be
/// >= MeasureSpec::floor_delta. eps = 0 degenerates to the all-zero index
/// (the grid is meaningless without slack).
std::vector<int64_t> grid_index(const MeasureVector& v, double eps);

enum class VerifiedKind { none, factual, counterfactual, both };

std::string verified_kind_token(VerifiedKind k);

constexpr uint32_t no_state = UINT32_MAX;

/// One node of the candidate-transition DAG. Verified states additionally
/// carry coordinates and dominance bookkeeping; roots and failed candidates
/// only the structural fields.
struct State {
  uint32_t id = 0;
  int32_t zeta_index = -1;              // arrival order among verified states
  std::vector<uint32_t> edges;          // candidate edge ids, sorted
  std::vector<int32_t> nodes;           // endpoint set, sorted
  uint32_t parent = no_state;           // transition source
  uint32_t edit_edge = 0;               // edge deleted/inserted on the transition
  bool edit_insert = false;
  bool is_root = false;
  VerifiedKind kind = VerifiedKind::none;
  MeasureVector phi;
  RawMeasures raw;
  std::vector<int64_t> grid;
  bitvec bits;                          // bit i: verified state with zeta index i
                                        // is eps-dominated by this state
  uint64_t ds = 0;                      // popcount of bits
  std::optional<Eigen::VectorXd> embedding;

  bool verified() const { return zeta_index >= 0; }
};

/// Append-only record of an explanation run: the transition DAG, the verified
/// stream, the dominance frontiers, and the maintained explanation. A state's
/// dominance bit for its own position is never set.
struct StateGraph {
  double eps = 0.0;
  int k = 0;
  int64_t lhop_nodes = 0;  // |V(G^L(v_t))|, diversity coverage denominator

  std::vector<State> states;
  std::vector<uint32_t> zeta;            // verified state ids in arrival order
  std::vector<uint32_t> frontier_eps;    // not eps-dominated by any verified state
  std::vector<uint32_t> frontier_plain;  // not plainly dominated by any verified state
  std::vector<uint32_t> explanation;     // current members, arrival order

  uint32_t add_state(State s);
  const State& at(uint32_t id) const { return states[id]; }
  State& at(uint32_t id) { return states[id]; }
};

/// Union dominance power of a set of verified states: popcount of the OR of
/// their bitvectors. Throws when a state id is unknown or unverified.
uint64_t dominance_power(const StateGraph& sg, const std::vector<uint32_t>& ids);

/// Outcome flags of one updater step, for instrumentation and tests.
struct UpdateOutcome {
  bool admitted = false;
  bool swapped = false;
  uint32_t swapped_out = no_state;
  std::vector<uint32_t> evicted;  // members removed because the newcomer dominates them
};

/// Admission gate facts computed while integrating a newly verified state.
struct StateIntegration {
  bool plainly_dominated = false;  // some verified state plainly dominates the newcomer
  bool duplicate_phi = false;      // a plain-frontier member already has these coordinates
};

/// Shared first phase of every updater: assigns the arrival index, exchanges
/// dominance bits with all earlier verified states, maintains both frontiers,
/// and appends the state to the verified stream. Leaves the explanation set
/// untouched; callers apply their own admission policy.
StateIntegration integrate_verified_state(StateGraph& sg, uint32_t state_id, double eps);

/// Streaming skyline update for one newly verified state (already appended to
/// sg.states with phi set, zeta_index unassigned). Assigns the zeta index,
/// integrates dominance bits both directions, maintains the frontiers, and
/// applies the bounded-size admission policy:
///  - a newcomer plainly dominated by any verified state is recorded only;
///  - a newcomer whose phi equals a plain-frontier member's is recorded only;
///  - below capacity the newcomer joins, evicting members it plainly dominates;
///  - at capacity the member with minimal dominance power (earliest arrival on
///    ties) is swapped out, but only when the union power of the swapped set
///    exceeds (1 + 1/k) times the current union power.
UpdateOutcome update_sx(StateGraph& sg, uint32_t state_id, int k, double eps);

}  // namespace skyx
