#pragma once

#include <vector>

#include "maastar/model.hpp"
#include "maastar/policy.hpp"

namespace maastar {

/// Exact expected sum of rewards of executing a policy vector from the
/// model's start distribution. Computed by depth-first traversal of joint
/// observation histories carrying unnormalized state weights; branches whose
/// weight sums to exactly zero are pruned, which cannot change the value.
/// Cost: O(prod_i |Omega_i|^t) history nodes, O(|S|^2) each.
/// Pure function; safe to call concurrently.
double evaluate(const DecPomdp& model, const PolicyVector& delta);

/// State distribution after executing the vector, marginalized over all
/// joint observation histories. Sums to 1. Depth 0 returns the start
/// distribution.
StateDistribution reachable_distribution(const DecPomdp& model, const PolicyVector& delta);

/// Depth-(T-t) policy trees attached to every length-t observation history
/// of each agent, turning a depth-t prefix into a full depth-T vector.
/// trees_by_history[agent] is indexed by the lexicographic rank of the
/// agent's length-t history.
struct Completion {
  int horizon_remaining = 0;
  std::vector<std::vector<PolicyTree>> trees_by_history;
};

/// Full-depth vector whose first t levels equal delta and whose subtree
/// below each length-t history is the completion's tree for that history.
/// Throws std::invalid_argument on depth mismatch or missing history.
PolicyVector stitch(const PolicyVector& delta, const Completion& completion);

/// Value contributed by a completion on top of a prefix:
/// evaluate(stitch(delta, completion)) - evaluate(delta).
double completion_value(const DecPomdp& model, const PolicyVector& delta,
                        const Completion& completion);

}  // namespace maastar
