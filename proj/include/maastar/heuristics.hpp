#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "maastar/evaluation.hpp"
#include "maastar/model.hpp"
#include "maastar/policy.hpp"

namespace maastar {

enum class HeuristicKind { mdp, recursive, external };

std::string to_string(HeuristicKind kind);

/// A nested solve ran out of its node or time budget before proving
/// optimality; the recursive table cannot be completed.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-state optimistic value bounds h^t(s) for every remaining horizon
/// t in 0..horizon. Row 0 is identically zero. Immutable once built; rows are
/// computed once and shared by every search node at the same depth.
class HeuristicTable {
 public:
  HeuristicTable() = default;
  HeuristicTable(HeuristicKind kind, int horizon, int num_states);

  HeuristicKind kind() const { return kind_; }
  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }

  std::span<const double> row(int t) const {
    return {values_.data() + static_cast<std::size_t>(t) * num_states_,
            static_cast<std::size_t>(num_states_)};
  }
  double at(int t, int s) const { return values_[static_cast<std::size_t>(t) * num_states_ + s]; }
  void set(int t, int s, double v) { values_[static_cast<std::size_t>(t) * num_states_ + s] = v; }

  /// Table with caller-supplied rows (row index = remaining horizon),
  /// the seam for externally computed bounds.
  static HeuristicTable external(std::vector<std::vector<double>> rows);

 private:
  HeuristicKind kind_ = HeuristicKind::external;
  int horizon_ = 0;
  int num_states_ = 0;
  std::vector<double> values_;  // (horizon+1) x num_states
};

/// Finite-horizon value iteration on the underlying fully observable
/// joint-action MDP:
///   V^0 = 0,  V^t(s) = max_ja [ R(s,ja) + sum_s' P(s'|s,ja) V^(t-1)(s') ].
/// Observation tables are ignored. The max scans joint actions in canonical
/// order; first maximizer wins.
HeuristicTable mdp_values(const DecPomdp& model, int horizon);

/// Outcome of one nested solve used while building the recursive table.
struct SubsolveOutcome {
  double value = 0.0;
  std::uint64_t evaluated = 0;
  bool proven = false;
};

/// Solves `model` (already carrying a point-mass start) to optimality at
/// `horizon`, guided by the partially built table. Provided by the search
/// module; injected here to keep this module independent of it.
using SubSolver = std::function<SubsolveOutcome(
    const DecPomdp& model, int horizon, const HeuristicTable& partial)>;

struct RecursiveTableResult {
  HeuristicTable table;
  std::uint64_t subsearch_evaluated = 0;
};

/// Exact decentralized optima as heuristic rows, built bottom-up:
/// row 1 is max_ja R(s, ja); row t (2 <= t <= horizon-1) solves the problem
/// from a point-mass start at each state with the rows below as heuristic,
/// memoizing each (state, t) exactly once. Row `horizon` falls back to the
/// MDP bound (it is only consulted for depth-0 prefixes, which the search
/// never enqueues). Throws BudgetExhausted when a nested solve runs out of
/// budget.
RecursiveTableResult recursive_values(const DecPomdp& model, int horizon,
                                      const SubSolver& solver);

/// Policy-vector heuristic: the reachable state distribution after the
/// prefix, dotted with the table row for the remaining horizon.
/// Throws std::invalid_argument when the table horizon is smaller than T.
double heuristic_value(const DecPomdp& model, const PolicyVector& delta,
                       const HeuristicTable& table, int total_horizon);

}  // namespace maastar
