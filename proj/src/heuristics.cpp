#include "maastar/heuristics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace maastar {

std::string to_string(HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::mdp: return "mdp";
    case HeuristicKind::recursive: return "recursive";
    case HeuristicKind::external: return "external";
  }
  return "?";
}

HeuristicTable::HeuristicTable(HeuristicKind kind, int horizon, int num_states)
    : kind_(kind), horizon_(horizon), num_states_(num_states) {
  if (horizon < 0 || num_states < 1) throw std::invalid_argument("bad heuristic table shape");
  values_.assign(static_cast<std::size_t>(horizon + 1) * num_states, 0.0);
}

HeuristicTable HeuristicTable::external(std::vector<std::vector<double>> rows) {
  if (rows.empty() || rows[0].empty())
    throw std::invalid_argument("external table needs at least row 0");
  HeuristicTable t(HeuristicKind::external, static_cast<int>(rows.size()) - 1,
                   static_cast<int>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw std::invalid_argument("external table rows differ in length");
    for (std::size_t s = 0; s < rows[r].size(); ++s)
      t.set(static_cast<int>(r), static_cast<int>(s), rows[r][s]);
  }
  return t;
}

HeuristicTable mdp_values(const DecPomdp& model, int horizon) {
  const std::size_t S = model.states.size();
  const std::size_t JA = model.num_joint_actions();
  HeuristicTable table(HeuristicKind::mdp, horizon, static_cast<int>(S));
  for (int t = 1; t <= horizon; ++t) {
    const auto prev = table.row(t - 1);
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t ja = 0; ja < JA; ++ja) {
        double q = model.rew(static_cast<int>(s), ja);
        const auto row = model.transition_row(static_cast<int>(s), ja);
        for (std::size_t s2 = 0; s2 < S; ++s2) q += row[s2] * prev[s2];
        if (q > best) best = q;
      }
      table.set(t, static_cast<int>(s), best);
    }
  }
  return table;
}

RecursiveTableResult recursive_values(const DecPomdp& model, int horizon,
                                      const SubSolver& solver) {
  if (horizon < 1) throw std::invalid_argument("recursive table requires horizon >= 1");
  const std::size_t S = model.states.size();
  const std::size_t JA = model.num_joint_actions();
  RecursiveTableResult result;
  result.table = HeuristicTable(HeuristicKind::recursive, horizon, static_cast<int>(S));
  HeuristicTable& table = result.table;

  if (horizon > 1) {
    // one step to go: the optimum is a single joint action
    for (std::size_t s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t ja = 0; ja < JA; ++ja)
        best = std::max(best, model.rew(static_cast<int>(s), ja));
      table.set(1, static_cast<int>(s), best);
    }
  }

  for (int t = 2; t <= horizon - 1; ++t) {
    // nested solves see only the rows already proven exact
    HeuristicTable partial(HeuristicKind::recursive, t, static_cast<int>(S));
    for (int r = 0; r <= t - 1; ++r)
      for (std::size_t s = 0; s < S; ++s)
        partial.set(r, static_cast<int>(s), table.at(r, static_cast<int>(s)));
    for (std::size_t s = 0; s < S; ++s) {
      DecPomdp sub = model.with_start(StateDistribution::point_mass(S, s));
      SubsolveOutcome out = solver(sub, t, partial);
      result.subsearch_evaluated += out.evaluated;
      if (!out.proven)
        throw BudgetExhausted("nested solve for the recursive heuristic ran out of budget");
      // an exhausted-open-list solve of a nonempty problem always returns a value
      table.set(t, static_cast<int>(s), out.value);
    }
  }

  // row `horizon` is only consulted for depth-0 prefixes; the MDP bound keeps
  // it admissible without solving the original problem inside its own table
  HeuristicTable mdp = mdp_values(model, horizon);
  for (std::size_t s = 0; s < S; ++s)
    table.set(horizon, static_cast<int>(s), mdp.at(horizon, static_cast<int>(s)));

  return result;
}

double heuristic_value(const DecPomdp& model, const PolicyVector& delta,
                       const HeuristicTable& table, int total_horizon) {
  if (table.horizon() < total_horizon)
    throw std::invalid_argument("heuristic table horizon too small");
  const int remaining = total_horizon - delta.depth;
  if (remaining < 0) throw std::invalid_argument("prefix deeper than the horizon");
  StateDistribution dist = reachable_distribution(model, delta);
  const auto row = table.row(remaining);
  double h = 0.0;
  for (std::size_t s = 0; s < dist.weights.size(); ++s) h += dist.weights[s] * row[s];
  return h;
}

}  // namespace maastar
