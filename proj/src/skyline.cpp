#include "skyx/skyline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skyx {

bool dominates(const MeasureVector& a, const MeasureVector& b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("dominance needs equal-length non-empty vectors");
  bool strict = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (b[i] < a[i]) return false;
    if (b[i] > a[i]) strict = true;
  }
  return strict;
}

bool eps_dominates(const MeasureVector& a, const MeasureVector& b, double eps) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("dominance needs equal-length non-empty vectors");
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  bool some = false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] > (1.0 + eps) * b[i]) return false;
    if (a[i] <= b[i]) some = true;
  }
  return some;
}

std::vector<int64_t> grid_index(const MeasureVector& v, double eps) {
  if (eps < 0.0) throw std::invalid_argument("eps must be >= 0");
  std::vector<int64_t> cell(v.size(), 0);
  if (eps == 0.0) return cell;  // degenerate: one cell, callers fall back to exact comparisons
  const double denom = std::log1p(eps);
  for (size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= MeasureSpec::floor_delta))
      throw data_error("grid_index: value below measure floor");
    cell[i] = static_cast<int64_t>(std::floor(std::log(v[i]) / denom));
  }
  return cell;
}

std::string verified_kind_token(VerifiedKind k) {
  switch (k) {
    case VerifiedKind::none: return "none";
    case VerifiedKind::factual: return "factual";
    case VerifiedKind::counterfactual: return "counterfactual";
    case VerifiedKind::both: return "both";
  }
  return "none";
}

uint32_t StateGraph::add_state(State s) {
  s.id = static_cast<uint32_t>(states.size());
  states.push_back(std::move(s));
  return states.back().id;
}

uint64_t dominance_power(const StateGraph& sg, const std::vector<uint32_t>& ids) {
  std::vector<const bitvec*> parts;
  parts.reserve(ids.size());
  for (uint32_t id : ids) {
    if (id >= sg.states.size()) throw std::out_of_range("dominance_power: unknown state id");
    const State& s = sg.states[id];
    if (!s.verified()) throw std::invalid_argument("dominance_power: unverified state");
    parts.push_back(&s.bits);
  }
  return union_popcount(parts);
}

namespace {

void drop_id(std::vector<uint32_t>& v, uint32_t id) {
  v.erase(std::remove(v.begin(), v.end(), id), v.end());
}

// Union power of the current explanation with one member replaced.
uint64_t swapped_power(const StateGraph& sg, uint32_t out_id, uint32_t in_id) {
  std::vector<const bitvec*> parts;
  parts.reserve(sg.explanation.size());
  for (uint32_t id : sg.explanation)
    if (id != out_id) parts.push_back(&sg.states[id].bits);
  parts.push_back(&sg.states[in_id].bits);
  return union_popcount(parts);
}

}  // namespace

StateIntegration integrate_verified_state(StateGraph& sg, uint32_t state_id, double eps) {
  if (eps < 0.0) throw std::invalid_argument("integrate: eps must be >= 0");
  if (state_id >= sg.states.size()) throw std::out_of_range("integrate: unknown state id");

  State& s = sg.states[state_id];
  if (s.verified()) throw std::invalid_argument("integrate: state already processed");
  if (s.phi.size() == 0) throw std::invalid_argument("integrate: state has no coordinates");

  s.zeta_index = static_cast<int32_t>(sg.zeta.size());
  s.grid = grid_index(s.phi, eps);

  // Dominance bits in both directions against every earlier verified state.
  // The newcomer's own position is never set.
  StateIntegration gate;
  bool eps_dominated = false;
  for (uint32_t tid : sg.zeta) {
    State& t = sg.states[tid];
    if (eps_dominates(t.phi, s.phi, eps))
      s.bits.set(static_cast<size_t>(t.zeta_index));
    if (eps_dominates(s.phi, t.phi, eps)) {
      t.bits.set(static_cast<size_t>(s.zeta_index));
      t.ds = t.bits.popcount();
      eps_dominated = true;
    }
    if (dominates(s.phi, t.phi)) gate.plainly_dominated = true;
  }
  s.ds = s.bits.popcount();

  // Frontier upkeep: members the newcomer now covers leave; the newcomer
  // joins only when nothing already verified covers it.
  for (auto it = sg.frontier_eps.begin(); it != sg.frontier_eps.end();) {
    if (eps_dominates(sg.states[*it].phi, s.phi, eps))
      it = sg.frontier_eps.erase(it);
    else
      ++it;
  }
  if (!eps_dominated) sg.frontier_eps.push_back(state_id);

  for (auto it = sg.frontier_plain.begin(); it != sg.frontier_plain.end();) {
    if (dominates(sg.states[*it].phi, s.phi))
      it = sg.frontier_plain.erase(it);
    else
      ++it;
  }
  if (!gate.plainly_dominated) {
    for (uint32_t fid : sg.frontier_plain) {
      if (sg.states[fid].phi == s.phi) {
        gate.duplicate_phi = true;
        break;
      }
    }
    sg.frontier_plain.push_back(state_id);
  }

  sg.zeta.push_back(state_id);
  return gate;
}

UpdateOutcome update_sx(StateGraph& sg, uint32_t state_id, int k, double eps) {
  if (k < 1) throw std::invalid_argument("update_sx: k must be >= 1");
  sg.k = k;
  sg.eps = eps;

  StateIntegration gate = integrate_verified_state(sg, state_id, eps);
  const State& s = sg.states[state_id];

  UpdateOutcome out;
  while (true) {  // single pass; block exists for early exits
    if (gate.plainly_dominated || gate.duplicate_phi) break;

    if (sg.explanation.size() < static_cast<size_t>(k)) {
      for (auto it = sg.explanation.begin(); it != sg.explanation.end();) {
        if (dominates(sg.states[*it].phi, s.phi)) {
          out.evicted.push_back(*it);
          it = sg.explanation.erase(it);
        } else {
          ++it;
        }
      }
      sg.explanation.push_back(state_id);
      out.admitted = true;
      break;
    }

    // At capacity: replace the weakest member only when the union power
    // grows by a strict (1 + 1/k) factor.
    uint32_t weakest = sg.explanation.front();
    for (uint32_t mid : sg.explanation) {
      const State& m = sg.states[mid];
      const State& w = sg.states[weakest];
      if (m.ds < w.ds || (m.ds == w.ds && m.zeta_index < w.zeta_index)) weakest = mid;
    }
    uint64_t cur_power = dominance_power(sg, sg.explanation);
    uint64_t new_power = swapped_power(sg, weakest, state_id);
    if (static_cast<__uint128_t>(new_power) * static_cast<uint64_t>(k) >
        static_cast<__uint128_t>(cur_power) * static_cast<uint64_t>(k + 1)) {
      drop_id(sg.explanation, weakest);
      for (auto it = sg.explanation.begin(); it != sg.explanation.end();) {
        if (dominates(sg.states[*it].phi, s.phi)) {
          out.evicted.push_back(*it);
          it = sg.explanation.erase(it);
        } else {
          ++it;
        }
      }
      sg.explanation.push_back(state_id);
      out.admitted = true;
      out.swapped = true;
      out.swapped_out = weakest;
    }
    break;
  }

  return out;
}

}  // namespace skyx
