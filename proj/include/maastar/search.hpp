#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "maastar/heuristics.hpp"
#include "maastar/model.hpp"
#include "maastar/policy.hpp"

namespace maastar {

/// One incumbent improvement: when it happened, at which evaluated-node
/// index, and the new exact value. Values along a run strictly increase.
struct TraceEntry {
  double wall_seconds = 0.0;
  std::uint64_t evaluated_index = 0;
  double value = 0.0;
};

struct SearchStats {
  std::uint64_t evaluated_count = 0;   // children created and evaluated, roots included
  std::uint64_t subsearch_evaluated = 0;  // filled by recursive-table builders
  std::size_t max_open_size = 0;       // peak live open-list cardinality
  std::vector<TraceEntry> incumbent_trace;
  double wall_seconds = 0.0;
};

/// Invoked at every incumbent improvement with (wall seconds, value, vector).
/// Must not mutate search state.
using AnytimeCallback =
    std::function<void(double wall_seconds, double value, const PolicyVector& vector)>;

struct SearchOptions {
  int horizon = 1;
  /// Selection weight on the heuristic: nodes are selected by V + weight * H.
  /// 1.0 is plain best-first search; values below 1 bias the search toward
  /// deep nodes so incumbents appear sooner. Pruning and termination always
  /// use the unweighted V + H, so the final result stays exactly optimal.
  double weight = 1.0;
  std::uint64_t node_budget = 0;  // 0 = unbounded
  double time_budget_seconds = 0.0;  // 0 = unbounded
  AnytimeCallback on_incumbent;
  /// Diagnostic switch: never discard nodes by incumbent comparison, forcing
  /// a full enumeration. Only sensible on small instances.
  bool disable_pruning = false;
};

struct SearchResult {
  std::optional<PolicyVector> vector;  // empty only when a budget expired early
  double value = 0.0;
  bool proven_optimal = false;
  SearchStats stats;
};

/// Best-first search over policy vectors. Maintains an open list of partial
/// vectors keyed by V + weight*H with deterministic tie-breaking (deeper
/// node first, then insertion order), expands the selected node by one child
/// assignment per visit, keeps the best full-depth vector as the incumbent,
/// and prunes open nodes whose V + H cannot beat it. With weight 1 and an
/// admissible table the returned value is the exact optimum; budget expiry
/// is reported through proven_optimal = false, never silently.
/// Two runs with identical options produce identical results and stats.
SearchResult maa_star(const DecPomdp& model, const SearchOptions& options,
                      const HeuristicTable& table);

/// maa_star with a weight in (0, 1): incumbents stream through the callback
/// while the final value remains exactly optimal. Throws
/// std::invalid_argument unless 0 < weight < 1.
SearchResult anytime_run(const DecPomdp& model, const SearchOptions& options,
                         const HeuristicTable& table);

struct BruteForceResult {
  PolicyVector vector;
  double value = 0.0;
  std::uint64_t enumerated_count = 0;
};

/// Exhaustive enumeration of every depth-T policy vector; the test oracle the
/// search is checked against. Ties break to the first maximizer in
/// enumeration order. Throws std::runtime_error when the vector count
/// exceeds `cap`.
BruteForceResult brute_force(const DecPomdp& model, int horizon,
                             std::uint64_t cap = 100'000'000);

/// Number of depth-T policy vectors: prod_i |A_i|^(tree nodes of agent i).
/// Throws std::overflow_error instead of wrapping.
std::uint64_t brute_force_count(const DecPomdp& model, int horizon);

/// Adapter used to build recursive heuristic tables with this module's
/// search as the nested solver. Budgets apply to each nested run.
SubSolver make_subsolver(std::uint64_t node_budget = 0, double time_budget_seconds = 0.0);

/// Convenience wrapper: recursive_values driven by maa_star.
RecursiveTableResult build_recursive_table(const DecPomdp& model, int horizon,
                                           std::uint64_t node_budget = 0,
                                           double time_budget_seconds = 0.0);

}  // namespace maastar
