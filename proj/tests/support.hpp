// Shared helpers for the test suites: a seeded random-model generator,
// trajectory-enumeration oracles kept independent of the library's forward
// pass, and exhaustive policy/completion enumerators for small instances.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "maastar/evaluation.hpp"
#include "maastar/model.hpp"
#include "maastar/policy.hpp"

namespace testsupport {

using maastar::Completion;
using maastar::DecPomdp;
using maastar::PolicyTree;
using maastar::PolicyVector;
using maastar::StateDistribution;

// Small 2-agent model with |S| in 2..3, |A_i|, |Omega_i| in 1..2, random
// stochastic rows (some entries forced to zero), rewards in [-5, 5].
inline DecPomdp random_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto rand_int = [&rng](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };
  auto rand01 = [&rng]() { return (rng() >> 11) * 0x1.0p-53; };

  DecPomdp m;
  m.n_agents = 2;
  const int S = rand_int(2, 3);
  for (int s = 0; s < S; ++s) m.states.push_back("s" + std::to_string(s));
  m.actions.resize(2);
  m.observations.resize(2);
  for (int i = 0; i < 2; ++i) {
    const int A = rand_int(1, 2), O = rand_int(1, 2);
    for (int a = 0; a < A; ++a) m.actions[i].push_back("a" + std::to_string(a));
    for (int o = 0; o < O; ++o) m.observations[i].push_back("o" + std::to_string(o));
  }
  m.allocate_tables();

  auto fill_row = [&](double* row, std::size_t n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double v = rand01();
      if (n > 1 && rand01() < 0.25) v = 0.0;  // exercise zero-branch pruning
      row[k] = v;
      sum += v;
    }
    if (sum == 0.0) {
      row[0] = 1.0;
      return;
    }
    for (std::size_t k = 0; k < n; ++k) row[k] /= sum;
  };

  const std::size_t JA = m.num_joint_actions();
  const std::size_t JO = m.num_joint_observations();
  for (std::size_t s = 0; s < static_cast<std::size_t>(S); ++s)
    for (std::size_t ja = 0; ja < JA; ++ja)
      fill_row(&m.transition[(s * JA + ja) * S], S);
  for (std::size_t s2 = 0; s2 < static_cast<std::size_t>(S); ++s2)
    for (std::size_t ja = 0; ja < JA; ++ja)
      fill_row(&m.observation[(s2 * JA + ja) * JO], JO);
  for (auto& r : m.reward) r = -5.0 + 10.0 * rand01();
  fill_row(m.start.weights.data(), S);
  return m;
}

// Expected value by explicit enumeration of (state, observation) trajectories
// with their probabilities. Exponential; test-only.
inline double oracle_evaluate(const DecPomdp& m, const PolicyVector& delta) {
  const int depth = delta.depth;
  if (depth == 0) return 0.0;
  const int n = m.n_agents;
  const std::size_t S = m.states.size();
  double total = 0.0;

  std::vector<int> acts(n);
  // per-agent observation history ranks at each level
  std::vector<std::vector<std::size_t>> ranks(depth + 1, std::vector<std::size_t>(n, 0));

  auto recurse = [&](auto&& self, int t, int state, double prob, double reward_so_far) -> void {
    for (int i = 0; i < n; ++i) acts[i] = delta.trees[i].action_at_rank(t, ranks[t][i]);
    const std::size_t ja = m.joint_action_index(acts);
    const double reward = reward_so_far + m.rew(state, ja);
    if (t + 1 == depth) {
      total += prob * reward;
      return;
    }
    for (std::size_t s2 = 0; s2 < S; ++s2) {
      const double pt = m.trans(state, ja, s2);
      if (pt == 0.0) continue;
      for (std::size_t jo = 0; jo < m.num_joint_observations(); ++jo) {
        const double po = m.obs(static_cast<int>(s2), ja, jo);
        if (po == 0.0) continue;
        std::vector<int> obs(n);
        m.decode_joint_observation(jo, obs);
        for (int i = 0; i < n; ++i)
          ranks[t + 1][i] = ranks[t][i] * m.num_observations(i) + obs[i];
        self(self, t + 1, static_cast<int>(s2), prob * pt * po, reward);
      }
    }
  };

  for (std::size_t s0 = 0; s0 < S; ++s0) {
    if (m.start.weights[s0] == 0.0) continue;
    recurse(recurse, 0, static_cast<int>(s0), m.start.weights[s0], 0.0);
  }
  return total;
}

// State distribution after the vector, again by explicit trajectory
// enumeration (the final observation is marginalized away).
inline StateDistribution oracle_reachable(const DecPomdp& m, const PolicyVector& delta) {
  const int depth = delta.depth;
  StateDistribution out;
  out.weights.assign(m.states.size(), 0.0);
  if (depth == 0) {
    out.weights = m.start.weights;
    return out;
  }
  const int n = m.n_agents;
  const std::size_t S = m.states.size();
  std::vector<int> acts(n);
  std::vector<std::vector<std::size_t>> ranks(depth + 1, std::vector<std::size_t>(n, 0));

  auto recurse = [&](auto&& self, int t, int state, double prob) -> void {
    for (int i = 0; i < n; ++i) acts[i] = delta.trees[i].action_at_rank(t, ranks[t][i]);
    const std::size_t ja = m.joint_action_index(acts);
    for (std::size_t s2 = 0; s2 < S; ++s2) {
      const double pt = m.trans(state, ja, s2);
      if (pt == 0.0) continue;
      if (t + 1 == depth) {
        out.weights[s2] += prob * pt;
        continue;
      }
      for (std::size_t jo = 0; jo < m.num_joint_observations(); ++jo) {
        const double po = m.obs(static_cast<int>(s2), ja, jo);
        if (po == 0.0) continue;
        std::vector<int> obs(n);
        m.decode_joint_observation(jo, obs);
        for (int i = 0; i < n; ++i)
          ranks[t + 1][i] = ranks[t][i] * m.num_observations(i) + obs[i];
        self(self, t + 1, static_cast<int>(s2), prob * pt * po);
      }
    }
  };

  for (std::size_t s0 = 0; s0 < S; ++s0) {
    if (m.start.weights[s0] == 0.0) continue;
    recurse(recurse, 0, static_cast<int>(s0), m.start.weights[s0]);
  }
  return out;
}

// Every depth-d tree for one agent, enumerated over flat action assignments.
inline std::vector<PolicyTree> all_trees(const DecPomdp& m, int agent, int depth) {
  PolicyTree tree(agent, m.num_actions(agent), m.num_observations(agent), depth);
  const std::size_t nodes = tree.node_count();
  const int A = m.num_actions(agent);
  std::vector<int> assign(nodes, 0);
  std::vector<PolicyTree> out;
  while (true) {
    std::size_t k = 0;
    for (int l = 0; l < depth; ++l)
      for (std::size_t r = 0; r < tree.level_size(l); ++r) tree.set_action(l, r, assign[k++]);
    out.push_back(tree);
    int p = static_cast<int>(nodes) - 1;
    for (; p >= 0; --p) {
      if (++assign[p] < A) break;
      assign[p] = 0;
    }
    if (p < 0) break;
  }
  return out;
}

// Every depth-d policy vector (cartesian product of the agents' trees).
inline std::vector<PolicyVector> all_vectors(const DecPomdp& m, int depth) {
  std::vector<std::vector<PolicyTree>> per_agent;
  for (int i = 0; i < m.n_agents; ++i) per_agent.push_back(all_trees(m, i, depth));
  std::vector<PolicyVector> out;
  std::vector<std::size_t> pick(m.n_agents, 0);
  while (true) {
    PolicyVector v;
    v.depth = depth;
    for (int i = 0; i < m.n_agents; ++i) v.trees.push_back(per_agent[i][pick[i]]);
    out.push_back(std::move(v));
    int i = m.n_agents - 1;
    for (; i >= 0; --i) {
      if (++pick[i] < per_agent[i].size()) break;
      pick[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

// Every completion of a depth-t prefix with `rest` levels to go: one tree
// choice per (agent, length-t history).
inline std::vector<Completion> all_completions(const DecPomdp& m, int prefix_depth, int rest) {
  std::vector<std::vector<PolicyTree>> tree_choices;  // per agent
  std::vector<std::size_t> histories;                 // per agent
  for (int i = 0; i < m.n_agents; ++i) {
    tree_choices.push_back(all_trees(m, i, rest));
    std::size_t h = 1;
    for (int l = 0; l < prefix_depth; ++l) h *= m.num_observations(i);
    histories.push_back(h);
  }
  // flat slots: (agent, history)
  std::vector<std::pair<int, std::size_t>> slots;
  for (int i = 0; i < m.n_agents; ++i)
    for (std::size_t h = 0; h < histories[i]; ++h) slots.emplace_back(i, h);

  std::vector<std::size_t> pick(slots.size(), 0);
  std::vector<Completion> out;
  while (true) {
    Completion c;
    c.horizon_remaining = rest;
    c.trees_by_history.resize(m.n_agents);
    for (int i = 0; i < m.n_agents; ++i)
      c.trees_by_history[i].resize(histories[i],
                                   PolicyTree(i, m.num_actions(i), m.num_observations(i), rest));
    for (std::size_t k = 0; k < slots.size(); ++k)
      c.trees_by_history[slots[k].first][slots[k].second] = tree_choices[slots[k].first][pick[k]];
    out.push_back(std::move(c));
    int k = static_cast<int>(slots.size()) - 1;
    for (; k >= 0; --k) {
      if (++pick[k] < tree_choices[slots[k].first].size()) break;
      pick[k] = 0;
    }
    if (k < 0) break;
  }
  return out;
}

// Same model with states relabeled by `perm` (new index = perm[old index]).
inline DecPomdp permuted_model(const DecPomdp& m, const std::vector<int>& perm) {
  DecPomdp p = m;
  const std::size_t S = m.states.size();
  const std::size_t JA = m.num_joint_actions();
  const std::size_t JO = m.num_joint_observations();
  for (std::size_t s = 0; s < S; ++s) {
    p.states[perm[s]] = m.states[s];
    p.start.weights[perm[s]] = m.start.weights[s];
    for (std::size_t ja = 0; ja < JA; ++ja) {
      p.reward[perm[s] * JA + ja] = m.reward[s * JA + ja];
      for (std::size_t s2 = 0; s2 < S; ++s2)
        p.transition[(perm[s] * JA + ja) * S + perm[s2]] = m.transition[(s * JA + ja) * S + s2];
      for (std::size_t jo = 0; jo < JO; ++jo)
        p.observation[(perm[s] * JA + ja) * JO + jo] = m.observation[(s * JA + ja) * JO + jo];
    }
  }
  return p;
}

}  // namespace testsupport
