#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maastar/model.hpp"

namespace maastar {

/// A depth-t deterministic plan for one agent: an action for every
/// observation sequence of length 0..t-1, stored as a flat level-indexed
/// array. Level L holds |Omega_i|^L nodes ordered by the lexicographic rank
/// of the observation sequence. Depth 0 (no nodes) is allowed and represents
/// the empty plan. Immutable value type.
class PolicyTree {
 public:
  PolicyTree() = default;
  PolicyTree(int agent, int num_actions, int num_obs, int depth);

  int agent() const { return agent_; }
  int depth() const { return depth_; }
  int num_actions() const { return num_actions_; }
  int num_obs() const { return num_obs_; }

  std::size_t node_count() const { return actions_.size(); }
  std::size_t level_offset(int level) const;
  std::size_t level_size(int level) const;  // |Omega_i|^level

  int action_at_rank(int level, std::size_t rank) const;
  void set_action(int level, std::size_t rank, int action);

  /// Action at the node addressed by an observation sequence; the empty
  /// sequence addresses the root. Throws std::out_of_range when the sequence
  /// is as long as the depth or longer, or contains an invalid observation.
  int action_at(std::span<const int> history) const;

  /// New tree of depth+1 whose added leaf level takes the given actions
  /// (one per length-depth observation sequence, in rank order).
  PolicyTree extended(std::span<const int> leaf_actions) const;

  std::span<const int> flat() const { return actions_; }

  bool operator==(const PolicyTree&) const = default;

 private:
  int agent_ = 0;
  int num_actions_ = 1;
  int num_obs_ = 1;
  int depth_ = 0;
  std::vector<int> actions_;
};

/// One policy tree per agent, all of the same depth. The nodes of the
/// best-first search tree. Immutable value type.
struct PolicyVector {
  int depth = 0;
  std::vector<PolicyTree> trees;

  int num_agents() const { return static_cast<int>(trees.size()); }

  /// Empty (depth-0) vector for a model.
  static PolicyVector empty(const DecPomdp& model);

  /// Vector restricted to its first t levels.
  PolicyVector prefix(int t) const;

  bool operator==(const PolicyVector&) const = default;
};

/// An observation sequence of one agent, used as a tree-node address.
struct ObservationHistory {
  int agent = 0;
  std::vector<int> sequence;
};

int action_at(const PolicyTree& tree, const ObservationHistory& history);

/// Enumeration state for the children of one depth-t policy vector. A child
/// is an assignment of one action to every new leaf node; children are
/// enumerated as the mixed-radix decodings of next_child in [0, num_children),
/// digits ordered agent-major and leaf-major with the last leaf of the last
/// agent least significant.
struct ExpansionCursor {
  std::uint64_t next_child = 0;
  std::uint64_t num_children = 0;
  std::vector<std::uint64_t> slots_per_agent;  // |Omega_i|^t
  std::vector<int> actions_per_agent;          // digit base for agent i's slots

  bool exhausted() const { return next_child == num_children; }
  std::uint64_t total_slots() const;

  /// Digits of value in this cursor's radix, agent-major; out must have
  /// total_slots() entries.
  void decode(std::uint64_t value, std::span<int> out) const;
  /// Inverse of decode.
  std::uint64_t encode(std::span<const int> digits) const;
};

/// Cursor over the children of any depth-t vector of this model.
/// Throws std::overflow_error when the child count exceeds 64 bits.
ExpansionCursor make_expansion_cursor(const DecPomdp& model, int parent_depth);

/// Number of distinct depth-(t+1) children of a depth-t vector:
/// prod_i |A_i|^(|Omega_i|^t). Throws std::overflow_error instead of wrapping.
std::uint64_t num_children(const DecPomdp& model, int depth);

/// All depth-1 policy vectors, one root action per agent, in lexicographic
/// order by (agent-0 action, agent-1 action, ...).
std::vector<PolicyVector> root_vectors(const DecPomdp& model);

/// Child built from an explicit leaf assignment (cursor digits, agent-major).
PolicyVector materialize_child(const PolicyVector& parent, const ExpansionCursor& cursor,
                               std::span<const int> digits);

/// Next child of the parent, or nullopt once the cursor is exhausted.
/// Advances the cursor.
std::optional<PolicyVector> expand_child(const PolicyVector& parent, ExpansionCursor& cursor);

/// GraphViz rendering of one agent's tree: nodes labeled with action names,
/// edges labeled with observation names, root at rank 0.
std::string policy_tree_dot(const PolicyTree& tree, const std::vector<std::string>& action_names,
                            const std::vector<std::string>& observation_names,
                            const std::string& graph_name);

}  // namespace maastar
