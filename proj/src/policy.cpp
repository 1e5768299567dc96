#include "maastar/policy.hpp"

#include <sstream>
#include <stdexcept>

namespace maastar {

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a)
    throw std::overflow_error("policy child count exceeds 64 bits");
  return a * b;
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul(r, base);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// PolicyTree

PolicyTree::PolicyTree(int agent, int num_actions, int num_obs, int depth)
    : agent_(agent), num_actions_(num_actions), num_obs_(num_obs), depth_(depth) {
  if (depth < 0 || num_actions < 1 || num_obs < 1)
    throw std::invalid_argument("bad policy tree shape");
  std::size_t count = 0, level = 1;
  for (int l = 0; l < depth; ++l) {
    count += level;
    level *= num_obs;
  }
  actions_.assign(count, 0);
}

std::size_t PolicyTree::level_offset(int level) const {
  std::size_t off = 0, size = 1;
  for (int l = 0; l < level; ++l) {
    off += size;
    size *= num_obs_;
  }
  return off;
}

std::size_t PolicyTree::level_size(int level) const {
  std::size_t size = 1;
  for (int l = 0; l < level; ++l) size *= num_obs_;
  return size;
}

int PolicyTree::action_at_rank(int level, std::size_t rank) const {
  return actions_[level_offset(level) + rank];
}

void PolicyTree::set_action(int level, std::size_t rank, int action) {
  actions_[level_offset(level) + rank] = action;
}

int PolicyTree::action_at(std::span<const int> history) const {
  if (static_cast<int>(history.size()) > depth_ - 1)
    throw std::out_of_range("observation history too long for tree depth");
  std::size_t rank = 0;
  for (int o : history) {
    if (o < 0 || o >= num_obs_) throw std::out_of_range("invalid observation index");
    rank = rank * num_obs_ + o;
  }
  return action_at_rank(static_cast<int>(history.size()), rank);
}

PolicyTree PolicyTree::extended(std::span<const int> leaf_actions) const {
  if (leaf_actions.size() != level_size(depth_))
    throw std::invalid_argument("leaf assignment has wrong size");
  PolicyTree child = *this;
  child.depth_ = depth_ + 1;
  child.actions_.insert(child.actions_.end(), leaf_actions.begin(), leaf_actions.end());
  return child;
}

int action_at(const PolicyTree& tree, const ObservationHistory& history) {
  return tree.action_at(history.sequence);
}

// ---------------------------------------------------------------------------
// PolicyVector

PolicyVector PolicyVector::empty(const DecPomdp& model) {
  PolicyVector v;
  v.depth = 0;
  v.trees.reserve(model.n_agents);
  for (int i = 0; i < model.n_agents; ++i)
    v.trees.emplace_back(i, model.num_actions(i), model.num_observations(i), 0);
  return v;
}

PolicyVector PolicyVector::prefix(int t) const {
  if (t < 0 || t > depth) throw std::invalid_argument("bad prefix depth");
  PolicyVector v;
  v.depth = t;
  v.trees.reserve(trees.size());
  for (const auto& tree : trees) {
    PolicyTree cut(tree.agent(), tree.num_actions(), tree.num_obs(), t);
    for (int l = 0; l < t; ++l)
      for (std::size_t r = 0; r < tree.level_size(l); ++r)
        cut.set_action(l, r, tree.action_at_rank(l, r));
    v.trees.push_back(std::move(cut));
  }
  return v;
}

// ---------------------------------------------------------------------------
// expansion

std::uint64_t ExpansionCursor::total_slots() const {
  std::uint64_t n = 0;
  for (auto s : slots_per_agent) n += s;
  return n;
}

void ExpansionCursor::decode(std::uint64_t value, std::span<int> out) const {
  std::size_t pos = out.size();
  for (int i = static_cast<int>(slots_per_agent.size()) - 1; i >= 0; --i) {
    const std::uint64_t base = actions_per_agent[i];
    for (std::uint64_t k = 0; k < slots_per_agent[i]; ++k) {
      out[--pos] = static_cast<int>(value % base);
      value /= base;
    }
  }
}

std::uint64_t ExpansionCursor::encode(std::span<const int> digits) const {
  std::uint64_t value = 0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < slots_per_agent.size(); ++i)
    for (std::uint64_t k = 0; k < slots_per_agent[i]; ++k)
      value = value * actions_per_agent[i] + digits[pos++];
  return value;
}

ExpansionCursor make_expansion_cursor(const DecPomdp& model, int parent_depth) {
  ExpansionCursor c;
  c.num_children = 1;
  for (int i = 0; i < model.n_agents; ++i) {
    std::uint64_t slots = checked_pow(model.num_observations(i), parent_depth);
    c.slots_per_agent.push_back(slots);
    c.actions_per_agent.push_back(model.num_actions(i));
    c.num_children = checked_mul(c.num_children, checked_pow(model.num_actions(i), slots));
  }
  return c;
}

std::uint64_t num_children(const DecPomdp& model, int depth) {
  if (depth < 1) throw std::invalid_argument("num_children requires depth >= 1");
  return make_expansion_cursor(model, depth).num_children;
}

std::vector<PolicyVector> root_vectors(const DecPomdp& model) {
  ExpansionCursor cursor = make_expansion_cursor(model, 0);
  PolicyVector parent = PolicyVector::empty(model);
  std::vector<PolicyVector> roots;
  roots.reserve(cursor.num_children);
  while (auto child = expand_child(parent, cursor)) roots.push_back(std::move(*child));
  return roots;
}

PolicyVector materialize_child(const PolicyVector& parent, const ExpansionCursor& cursor,
                               std::span<const int> digits) {
  PolicyVector child;
  child.depth = parent.depth + 1;
  child.trees.reserve(parent.trees.size());
  std::size_t pos = 0;
  for (std::size_t i = 0; i < parent.trees.size(); ++i) {
    std::size_t slots = static_cast<std::size_t>(cursor.slots_per_agent[i]);
    child.trees.push_back(parent.trees[i].extended(digits.subspan(pos, slots)));
    pos += slots;
  }
  return child;
}

std::optional<PolicyVector> expand_child(const PolicyVector& parent, ExpansionCursor& cursor) {
  if (cursor.exhausted()) return std::nullopt;
  std::vector<int> digits(cursor.total_slots());
  cursor.decode(cursor.next_child, digits);
  ++cursor.next_child;
  return materialize_child(parent, cursor, digits);
}

// ---------------------------------------------------------------------------
// DOT export

std::string policy_tree_dot(const PolicyTree& tree, const std::vector<std::string>& action_names,
                            const std::vector<std::string>& observation_names,
                            const std::string& graph_name) {
  std::ostringstream out;
  out << "digraph \"" << graph_name << "\" {\n";
  out << "  rankdir=TB;\n";
  out << "  node [shape=box];\n";
  std::vector<int> history;
  // walk every addressable history so the rendering exercises action_at
  auto emit = [&](auto&& self, int level, std::size_t rank) -> void {
    int a = tree.action_at(history);
    out << "  n" << level << "_" << rank << " [label=\"" << action_names[a] << "\"];\n";
    if (level + 1 >= tree.depth()) return;
    for (int o = 0; o < tree.num_obs(); ++o) {
      std::size_t child_rank = rank * tree.num_obs() + o;
      out << "  n" << level << "_" << rank << " -> n" << level + 1 << "_" << child_rank
          << " [label=\"" << observation_names[o] << "\"];\n";
      history.push_back(o);
      self(self, level + 1, child_rank);
      history.pop_back();
    }
  };
  if (tree.depth() > 0) emit(emit, 0, 0);
  out << "}\n";
  return out.str();
}

}  // namespace maastar
