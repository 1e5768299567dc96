#include "maastar/search.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <memory>
#include <stdexcept>

#include "maastar/evaluation.hpp"

namespace maastar {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t checked_mul_u64(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) throw std::overflow_error("policy vector count exceeds 64 bits");
  return a * b;
}

std::uint64_t checked_pow_u64(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r = checked_mul_u64(r, base);
  return r;
}

// One reachable joint observation history at a node's leaf level: the
// per-agent tree node ranks it addresses and its unnormalized state weights.
struct LeafEntry {
  std::vector<std::size_t> ranks;
  std::vector<double> weights;
};

struct SearchNode {
  PolicyVector vector;
  double prefix_value = 0.0;
  double heuristic_value = 0.0;
  double f_value = 0.0;
  double selection_key = 0.0;
  // expansion state, built lazily on first selection
  bool expansion_ready = false;
  ExpansionCursor cursor;
  std::vector<int> digits;  // mixed-radix odometer, equals decode(cursor.next_child)
  std::vector<LeafEntry> leaf;
};

struct HeapEntry {
  double key = 0.0;
  double f = 0.0;
  int depth = 0;
  std::uint64_t seq = 0;
  std::unique_ptr<SearchNode> node;
};

// max-heap order: higher key, then deeper, then earlier insertion
struct EntryWorse {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.key != b.key) return a.key < b.key;
    if (a.depth != b.depth) return a.depth < b.depth;
    return a.seq > b.seq;
  }
};

class OpenList {
 public:
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  std::size_t peak() const { return peak_; }

  void push(HeapEntry entry) {
    heap_.push_back(std::move(entry));
    std::push_heap(heap_.begin(), heap_.end(), EntryWorse{});
    peak_ = std::max(peak_, heap_.size());
  }

  HeapEntry pop() {
    std::pop_heap(heap_.begin(), heap_.end(), EntryWorse{});
    HeapEntry e = std::move(heap_.back());
    heap_.pop_back();
    return e;
  }

  // bulk prune: drop every node whose f-value cannot beat the incumbent
  void prune_not_above(double threshold) {
    auto keep = std::remove_if(heap_.begin(), heap_.end(),
                               [threshold](const HeapEntry& e) { return e.f <= threshold; });
    if (keep != heap_.end()) {
      heap_.erase(keep, heap_.end());
      std::make_heap(heap_.begin(), heap_.end(), EntryWorse{});
    }
  }

 private:
  std::vector<HeapEntry> heap_;
  std::size_t peak_ = 0;
};

class Engine {
 public:
  Engine(const DecPomdp& model, const SearchOptions& options, const HeuristicTable& table)
      : model_(model), opts_(options), table_(table), T_(options.horizon) {
    if (T_ < 1) throw std::invalid_argument("horizon must be >= 1");
    if (!(opts_.weight > 0.0 && opts_.weight <= 1.0))
      throw std::invalid_argument("weight must be in (0, 1]");
    if (table.horizon() < T_) throw std::invalid_argument("heuristic table horizon too small");
    n_ = model.n_agents;
    S_ = model.states.size();
    dist_.resize(S_);
    const std::size_t JA = model.num_joint_actions();
    reward_by_action_.resize(JA * S_);
    for (std::size_t s = 0; s < S_; ++s)
      for (std::size_t ja = 0; ja < JA; ++ja)
        reward_by_action_[ja * S_ + s] = model.rew(static_cast<int>(s), ja);
  }

  SearchResult run() {
    start_ = Clock::now();
    init_roots();
    bool proven = false;
    while (true) {
      if (open_.empty()) {
        proven = !init_interrupted_;
        break;
      }
      if (budget_exhausted()) break;
      HeapEntry entry = open_.pop();
      SearchNode& node = *entry.node;
      if (node.vector.depth == T_) {
        // full-depth nodes only reach the open list through initialization
        try_improve(node.prefix_value, std::move(node.vector));
        continue;
      }
      if (!node.expansion_ready) prepare_expansion(node);
      if (node.cursor.exhausted()) continue;
      emit_child(node, /*initializing=*/false);
      if (!node.cursor.exhausted() &&
          (opts_.disable_pruning || node.f_value > incumbent_value_))
        open_.push(std::move(entry));
    }
    SearchResult result;
    result.value = incumbent_value_;
    result.vector = std::move(incumbent_);
    result.proven_optimal = proven;
    result.stats = std::move(stats_);
    result.stats.max_open_size = open_.peak();
    result.stats.wall_seconds = elapsed();
    return result;
  }

 private:
  const DecPomdp& model_;
  const SearchOptions& opts_;
  const HeuristicTable& table_;
  const int T_;
  int n_ = 0;
  std::size_t S_ = 0;

  Clock::time_point start_;
  SearchStats stats_;
  OpenList open_;
  std::uint64_t seq_ = 0;
  double incumbent_value_ = -std::numeric_limits<double>::infinity();
  std::optional<PolicyVector> incumbent_;
  int budget_check_countdown_ = 0;
  bool timed_out_ = false;
  bool init_interrupted_ = false;

  std::vector<double> dist_;  // scratch: child reachable distribution
  std::vector<double> reward_by_action_;  // reward transposed to [ja][s]

  double elapsed() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

  bool budget_exhausted() {
    if (opts_.node_budget != 0 && stats_.evaluated_count >= opts_.node_budget) return true;
    if (opts_.time_budget_seconds > 0.0) {
      if (--budget_check_countdown_ <= 0) {
        budget_check_countdown_ = 256;
        if (elapsed() >= opts_.time_budget_seconds) timed_out_ = true;
      }
      if (timed_out_) return true;
    }
    return false;
  }

  void init_roots() {
    // the open list starts as the cross product of the agents' action sets,
    // realized as the children of the empty depth-0 vector
    SearchNode root;
    root.vector = PolicyVector::empty(model_);
    prepare_expansion(root);
    while (!root.cursor.exhausted()) {
      if (budget_exhausted()) {
        init_interrupted_ = true;
        break;
      }
      emit_child(root, /*initializing=*/true);
    }
  }

  void prepare_expansion(SearchNode& node) {
    node.cursor = make_expansion_cursor(model_, node.vector.depth);
    node.digits.assign(static_cast<std::size_t>(node.cursor.total_slots()), 0);
    build_leaf_table(node);
    node.expansion_ready = true;
  }

  // forward pass to the node's depth, recording every reachable joint
  // history's per-agent ranks and unnormalized state weights
  void build_leaf_table(SearchNode& node) {
    const int depth = node.vector.depth;
    if (depth == 0) {
      LeafEntry e;
      e.ranks.assign(n_, 0);
      e.weights = model_.start.weights;
      node.leaf.push_back(std::move(e));
      return;
    }
    std::vector<std::vector<double>> w(depth + 1, std::vector<double>(S_));
    std::vector<std::vector<double>> after(depth, std::vector<double>(S_));
    std::vector<std::vector<std::size_t>> ranks(depth + 1,
                                                std::vector<std::size_t>(n_, 0));
    std::vector<int> acts(n_), obs(n_);
    const std::size_t JO = model_.num_joint_observations();
    w[0] = model_.start.weights;

    auto walk = [&](auto&& self, int level) -> void {
      if (level == depth) {
        LeafEntry e;
        e.ranks = ranks[level];
        e.weights = w[level];
        node.leaf.push_back(std::move(e));
        return;
      }
      for (int i = 0; i < n_; ++i)
        acts[i] = node.vector.trees[i].action_at_rank(level, ranks[level][i]);
      const std::size_t ja = model_.joint_action_index(acts);
      auto& u = after[level];
      u.assign(S_, 0.0);
      for (std::size_t s = 0; s < S_; ++s) {
        const double ws = w[level][s];
        if (ws == 0.0) continue;
        const auto row = model_.transition_row(static_cast<int>(s), ja);
        for (std::size_t s2 = 0; s2 < S_; ++s2) u[s2] += ws * row[s2];
      }
      for (std::size_t jo = 0; jo < JO; ++jo) {
        double total = 0.0;
        for (std::size_t s2 = 0; s2 < S_; ++s2) {
          double v = u[s2] * model_.obs(static_cast<int>(s2), ja, jo);
          w[level + 1][s2] = v;
          total += v;
        }
        if (total == 0.0) continue;
        model_.decode_joint_observation(jo, obs);
        for (int i = 0; i < n_; ++i)
          ranks[level + 1][i] = ranks[level][i] * model_.num_observations(i) + obs[i];
        self(self, level + 1);
      }
    };
    walk(walk, 0);
  }

  // generates the node's next child, updates incumbent/open list, advances
  // the cursor
  void emit_child(SearchNode& node, bool initializing) {
    const int child_depth = node.vector.depth + 1;
    const auto& cursor = node.cursor;

    double value = node.prefix_value;
    const bool terminal = child_depth == T_;
    if (!terminal) std::fill(dist_.begin(), dist_.end(), 0.0);

    for (const LeafEntry& leaf : node.leaf) {
      std::size_t ja = 0;
      std::size_t base = 0;
      for (int i = 0; i < n_; ++i) {
        ja = ja * cursor.actions_per_agent[i] + node.digits[base + leaf.ranks[i]];
        base += static_cast<std::size_t>(cursor.slots_per_agent[i]);
      }
      const double* reward_row = reward_by_action_.data() + ja * S_;
      for (std::size_t s = 0; s < S_; ++s) {
        const double ws = leaf.weights[s];
        if (ws == 0.0) continue;
        value += ws * reward_row[s];
        if (!terminal) {
          const auto row = model_.transition_row(static_cast<int>(s), ja);
          for (std::size_t s2 = 0; s2 < S_; ++s2) dist_[s2] += ws * row[s2];
        }
      }
    }
    ++stats_.evaluated_count;

    if (terminal && !initializing) {
      if (value > incumbent_value_)
        try_improve(value, materialize_child(node.vector, cursor, node.digits));
    } else {
      double h = 0.0;
      if (!terminal) {
        const auto row = table_.row(T_ - child_depth);
        for (std::size_t s = 0; s < S_; ++s) h += dist_[s] * row[s];
      }
      const double f = value + h;
      if (opts_.disable_pruning || f > incumbent_value_ || initializing) {
        auto child = std::make_unique<SearchNode>();
        child->vector = materialize_child(node.vector, cursor, node.digits);
        child->prefix_value = value;
        child->heuristic_value = h;
        child->f_value = f;
        child->selection_key = value + opts_.weight * h;
        HeapEntry e;
        e.key = child->selection_key;
        e.f = f;
        e.depth = child_depth;
        e.seq = seq_++;
        e.node = std::move(child);
        open_.push(std::move(e));
      }
    }

    // advance the odometer and the cursor together
    ++node.cursor.next_child;
    for (int p = static_cast<int>(node.digits.size()) - 1; p >= 0; --p) {
      int agent = agent_of_slot(cursor, p);
      if (++node.digits[p] < cursor.actions_per_agent[agent]) break;
      node.digits[p] = 0;
    }
  }

  static int agent_of_slot(const ExpansionCursor& cursor, int slot) {
    std::size_t base = 0;
    for (std::size_t i = 0; i < cursor.slots_per_agent.size(); ++i) {
      base += static_cast<std::size_t>(cursor.slots_per_agent[i]);
      if (static_cast<std::size_t>(slot) < base) return static_cast<int>(i);
    }
    return static_cast<int>(cursor.slots_per_agent.size()) - 1;
  }

  void try_improve(double value, PolicyVector vector) {
    if (value <= incumbent_value_) return;
    incumbent_value_ = value;
    incumbent_ = std::move(vector);
    const double t = elapsed();
    stats_.incumbent_trace.push_back(TraceEntry{t, stats_.evaluated_count, value});
    if (opts_.on_incumbent) opts_.on_incumbent(t, value, *incumbent_);
    if (!opts_.disable_pruning) open_.prune_not_above(value);
  }
};

}  // namespace

SearchResult maa_star(const DecPomdp& model, const SearchOptions& options,
                      const HeuristicTable& table) {
  Engine engine(model, options, table);
  return engine.run();
}

SearchResult anytime_run(const DecPomdp& model, const SearchOptions& options,
                         const HeuristicTable& table) {
  if (!(options.weight > 0.0 && options.weight < 1.0))
    throw std::invalid_argument("anytime runs require a weight in (0, 1)");
  return maa_star(model, options, table);
}

// ---------------------------------------------------------------------------
// brute force oracle

std::uint64_t brute_force_count(const DecPomdp& model, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  std::uint64_t total = 1;
  for (int i = 0; i < model.n_agents; ++i) {
    std::uint64_t nodes = 0, level = 1;
    for (int l = 0; l < horizon; ++l) {
      nodes += level;
      level = checked_mul_u64(level, model.num_observations(i));
    }
    total = checked_mul_u64(total, checked_pow_u64(model.num_actions(i), nodes));
  }
  return total;
}

BruteForceResult brute_force(const DecPomdp& model, int horizon, std::uint64_t cap) {
  const std::uint64_t total = brute_force_count(model, horizon);
  if (total > cap)
    throw std::runtime_error("brute force would enumerate " + std::to_string(total) +
                             " policy vectors, above the cap of " + std::to_string(cap));

  // flat slot layout: agent-major, tree nodes in level order, last slot least
  // significant; the all-zero assignment comes first
  struct Slot {
    int agent;
    int level;
    std::size_t rank;
    int base;
  };
  std::vector<Slot> slots;
  PolicyVector current;
  current.depth = horizon;
  for (int i = 0; i < model.n_agents; ++i) {
    current.trees.emplace_back(i, model.num_actions(i), model.num_observations(i), horizon);
    for (int l = 0; l < horizon; ++l)
      for (std::size_t r = 0; r < current.trees[i].level_size(l); ++r)
        slots.push_back(Slot{i, l, r, model.num_actions(i)});
  }

  BruteForceResult result;
  result.enumerated_count = total;
  result.value = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k < total; ++k) {
    double v = evaluate(model, current);
    if (v > result.value) {
      result.value = v;
      result.vector = current;
    }
    // odometer step
    for (int p = static_cast<int>(slots.size()) - 1; p >= 0; --p) {
      const Slot& slot = slots[p];
      int a = current.trees[slot.agent].action_at_rank(slot.level, slot.rank) + 1;
      if (a < slot.base) {
        current.trees[slot.agent].set_action(slot.level, slot.rank, a);
        break;
      }
      current.trees[slot.agent].set_action(slot.level, slot.rank, 0);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// recursive-table plumbing

SubSolver make_subsolver(std::uint64_t node_budget, double time_budget_seconds) {
  return [node_budget, time_budget_seconds](const DecPomdp& m, int horizon,
                                            const HeuristicTable& partial) {
    SearchOptions o;
    o.horizon = horizon;
    o.node_budget = node_budget;
    o.time_budget_seconds = time_budget_seconds;
    SearchResult r = maa_star(m, o, partial);
    return SubsolveOutcome{r.value, r.stats.evaluated_count, r.proven_optimal};
  };
}

RecursiveTableResult build_recursive_table(const DecPomdp& model, int horizon,
                                           std::uint64_t node_budget,
                                           double time_budget_seconds) {
  return recursive_values(model, horizon, make_subsolver(node_budget, time_budget_seconds));
}

}  // namespace maastar
