#include "maastar/evaluation.hpp"

#include <stdexcept>

namespace maastar {

namespace {

// Shared forward pass over joint observation histories. At each history node
// the joint action is read from the trees, the reward is accumulated with the
// node's unnormalized weights, and the weights are pushed through the
// transition and observation tables. `sink` collects the post-transition
// marginal weights of the final level when non-null.
class ForwardPass {
 public:
  ForwardPass(const DecPomdp& model, const PolicyVector& delta, std::vector<double>* sink)
      : model_(model), delta_(delta), sink_(sink), n_(model.n_agents) {
    const int depth = delta.depth;
    weights_.resize(depth + 1, std::vector<double>(model.states.size()));
    after_.resize(depth, std::vector<double>(model.states.size()));
    ranks_.resize(depth + 1, std::vector<std::size_t>(n_, 0));
    acts_.resize(n_);
    obs_.resize(n_);
  }

  double run() {
    weights_[0] = model_.start.weights;
    if (delta_.depth == 0) {
      if (sink_) *sink_ = weights_[0];
      return 0.0;
    }
    step(0);
    return value_;
  }

 private:
  const DecPomdp& model_;
  const PolicyVector& delta_;
  std::vector<double>* sink_;
  const int n_;
  double value_ = 0.0;
  std::vector<std::vector<double>> weights_;  // per level, indexed by state
  std::vector<std::vector<double>> after_;    // post-transition scratch per level
  std::vector<std::vector<std::size_t>> ranks_;  // per level, per agent node rank
  std::vector<int> acts_, obs_;

  void step(int level) {
    const std::size_t S = model_.states.size();
    const auto& w = weights_[level];
    for (int i = 0; i < n_; ++i)
      acts_[i] = delta_.trees[i].action_at_rank(level, ranks_[level][i]);
    const std::size_t ja = model_.joint_action_index(acts_);

    for (std::size_t s = 0; s < S; ++s)
      if (w[s] != 0.0) value_ += w[s] * model_.rew(static_cast<int>(s), ja);

    // post-transition weights u(s') = sum_s w(s) P(s'|s, ja)
    auto& u = after_[level];
    u.assign(S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
      const double ws = w[s];
      if (ws == 0.0) continue;
      const auto row = model_.transition_row(static_cast<int>(s), ja);
      for (std::size_t s2 = 0; s2 < S; ++s2) u[s2] += ws * row[s2];
    }

    if (level + 1 == delta_.depth) {
      if (sink_)
        for (std::size_t s2 = 0; s2 < S; ++s2) (*sink_)[s2] += u[s2];
      return;
    }

    const std::size_t JO = model_.num_joint_observations();
    auto& w_next = weights_[level + 1];
    for (std::size_t jo = 0; jo < JO; ++jo) {
      double total = 0.0;
      for (std::size_t s2 = 0; s2 < S; ++s2) {
        double v = u[s2] * model_.obs(static_cast<int>(s2), ja, jo);
        w_next[s2] = v;
        total += v;
      }
      if (total == 0.0) continue;  // unreachable branch
      model_.decode_joint_observation(jo, obs_);
      for (int i = 0; i < n_; ++i)
        ranks_[level + 1][i] = ranks_[level][i] * model_.num_observations(i) + obs_[i];
      step(level + 1);
    }
  }
};

}  // namespace

double evaluate(const DecPomdp& model, const PolicyVector& delta) {
  return ForwardPass(model, delta, nullptr).run();
}

StateDistribution reachable_distribution(const DecPomdp& model, const PolicyVector& delta) {
  StateDistribution out;
  out.weights.assign(model.states.size(), 0.0);
  if (delta.depth == 0) {
    out.weights = model.start.weights;
    return out;
  }
  ForwardPass(model, delta, &out.weights).run();
  return out;
}

PolicyVector stitch(const PolicyVector& delta, const Completion& completion) {
  const int t = delta.depth;
  const int rest = completion.horizon_remaining;
  if (rest < 1) throw std::invalid_argument("completion must have positive depth");
  if (completion.trees_by_history.size() != delta.trees.size())
    throw std::invalid_argument("completion agent count mismatch");

  PolicyVector full;
  full.depth = t + rest;
  full.trees.reserve(delta.trees.size());
  for (std::size_t i = 0; i < delta.trees.size(); ++i) {
    const PolicyTree& base = delta.trees[i];
    const auto& attach = completion.trees_by_history[i];
    if (attach.size() != base.level_size(t))
      throw std::invalid_argument("completion is missing a history for agent " +
                                  std::to_string(i));
    PolicyTree tree(base.agent(), base.num_actions(), base.num_obs(), t + rest);
    for (int l = 0; l < t; ++l)
      for (std::size_t r = 0; r < base.level_size(l); ++r)
        tree.set_action(l, r, base.action_at_rank(l, r));
    for (std::size_t h = 0; h < attach.size(); ++h) {
      if (attach[h].depth() != rest)
        throw std::invalid_argument("completion tree depth mismatch");
      // history (h, suffix) addresses node `suffix` of the attached tree
      for (int l = 0; l < rest; ++l) {
        const std::size_t suffixes = attach[h].level_size(l);
        for (std::size_t r = 0; r < suffixes; ++r)
          tree.set_action(t + l, h * suffixes + r, attach[h].action_at_rank(l, r));
      }
    }
    full.trees.push_back(std::move(tree));
  }
  return full;
}

double completion_value(const DecPomdp& model, const PolicyVector& delta,
                        const Completion& completion) {
  return evaluate(model, stitch(delta, completion)) - evaluate(model, delta);
}

}  // namespace maastar
