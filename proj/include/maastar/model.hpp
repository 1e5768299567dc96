#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace maastar {

/// A probability distribution over the states of a DecPomdp, stored as one
/// weight per state in model order. Normalized everywhere except inside the
/// evaluation forward pass, which works with unnormalized weights.
struct StateDistribution {
  std::vector<double> weights;

  static StateDistribution point_mass(std::size_t num_states, std::size_t state);
  static StateDistribution uniform(std::size_t num_states);

  double sum() const;
  bool operator==(const StateDistribution&) const = default;
};

/// Error raised by parse_model. `line` is 1-based; 0 means the error is a
/// document-level problem (e.g. a table row that no line ever touched).
/// `column` is 1-based, 0 when not meaningful.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A finite-horizon decentralized POMDP instance.
///
/// Tables are dense row-major arrays:
///   transition[(s * JA + ja) * S + s']   = P(s' | s, joint action)
///   observation[(s' * JA + ja) * JO + jo] = O(joint obs | s', joint action)
///   reward[s * JA + ja]                   = R(s, joint action)
/// where JA = prod_i |A_i| and JO = prod_i |Omega_i|, both indexed
/// agent-major (agent 0 is the most significant digit).
///
/// Observations condition on the destination state. The horizon is a solve
/// parameter, not part of the model. Instances are immutable after
/// construction and safe to share across threads.
struct DecPomdp {
  int n_agents = 0;
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;       // [agent][action]
  std::vector<std::vector<std::string>> observations;  // [agent][observation]
  std::vector<double> transition;
  std::vector<double> observation;
  std::vector<double> reward;
  StateDistribution start;

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions(int agent) const { return static_cast<int>(actions[agent].size()); }
  int num_observations(int agent) const { return static_cast<int>(observations[agent].size()); }

  std::size_t num_joint_actions() const;
  std::size_t num_joint_observations() const;

  std::size_t joint_action_index(std::span<const int> per_agent) const;
  std::size_t joint_observation_index(std::span<const int> per_agent) const;
  void decode_joint_action(std::size_t ja, std::span<int> out) const;
  void decode_joint_observation(std::size_t jo, std::span<int> out) const;

  double trans(int s, std::size_t ja, int s2) const {
    return transition[(s * num_joint_actions() + ja) * states.size() + s2];
  }
  /// Row P(. | s, ja), contiguous over destination states.
  std::span<const double> transition_row(int s, std::size_t ja) const {
    return {transition.data() + (s * num_joint_actions() + ja) * states.size(),
            states.size()};
  }
  double obs(int s2, std::size_t ja, std::size_t jo) const {
    return observation[(s2 * num_joint_actions() + ja) * num_joint_observations() + jo];
  }
  /// Row O(. | s', ja), contiguous over joint observations.
  std::span<const double> observation_row(int s2, std::size_t ja) const {
    return {observation.data() +
                (s2 * num_joint_actions() + ja) * num_joint_observations(),
            num_joint_observations()};
  }
  double rew(int s, std::size_t ja) const {
    return reward[s * num_joint_actions() + ja];
  }

  /// Copy of this model with a different start distribution.
  DecPomdp with_start(StateDistribution b0) const;

  /// Allocates zero-filled tables once the name lists are set. Throws
  /// std::invalid_argument when the joint spaces are unreasonably large.
  void allocate_tables();

  int state_index(const std::string& name) const;          // -1 when unknown
  int action_index(int agent, const std::string& name) const;
  int observation_index(int agent, const std::string& name) const;
};

/// One broken model invariant, in a human-readable form.
struct Violation {
  std::string what;
};

/// Checks every DecPomdp invariant (shape consistency, probability ranges,
/// row sums within 1e-9, finite rewards, normalized start) and returns the
/// full list of violations; empty means the model is valid.
std::vector<Violation> validate(const DecPomdp& model);

/// Parses the plain-text model format (see README). Wildcards are expanded,
/// later entries override earlier ones, and two fully-specific entries for
/// the same index tuple are an error. The returned model has been validated;
/// any violated invariant is reported as a ParseError naming the offending
/// row and its sum.
DecPomdp parse_model(const std::string& text);

/// Canonical text form of a model; parse_model(serialize_model(m)) round-trips
/// names bit-exactly and probabilities to full double precision.
std::string serialize_model(const DecPomdp& model);

/// Built-in benchmark problems: "tiger-a", "tiger-b", "channel".
/// Throws std::invalid_argument for unknown names.
DecPomdp builtin(const std::string& name);

const std::vector<std::string>& builtin_names();

}  // namespace maastar
