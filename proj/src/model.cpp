#include "maastar/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace maastar {

namespace {

constexpr double kRowSumTolerance = 1e-9;
constexpr std::size_t kMaxTableEntries = 100'000'000;
constexpr int kMaxAgents = 1024;
constexpr std::size_t kMaxNames = 65'536;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// StateDistribution

StateDistribution StateDistribution::point_mass(std::size_t num_states, std::size_t state) {
  StateDistribution d;
  d.weights.assign(num_states, 0.0);
  d.weights.at(state) = 1.0;
  return d;
}

StateDistribution StateDistribution::uniform(std::size_t num_states) {
  StateDistribution d;
  d.weights.assign(num_states, 1.0 / static_cast<double>(num_states));
  return d;
}

double StateDistribution::sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

// ---------------------------------------------------------------------------
// ParseError

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) +
                         (column > 0 ? ", column " + std::to_string(column) : "") +
                         ": " + message),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// DecPomdp

std::size_t DecPomdp::num_joint_actions() const {
  std::size_t n = 1;
  for (const auto& a : actions) n *= a.size();
  return n;
}

std::size_t DecPomdp::num_joint_observations() const {
  std::size_t n = 1;
  for (const auto& o : observations) n *= o.size();
  return n;
}

std::size_t DecPomdp::joint_action_index(std::span<const int> per_agent) const {
  std::size_t idx = 0;
  for (int i = 0; i < n_agents; ++i) idx = idx * actions[i].size() + per_agent[i];
  return idx;
}

std::size_t DecPomdp::joint_observation_index(std::span<const int> per_agent) const {
  std::size_t idx = 0;
  for (int i = 0; i < n_agents; ++i) idx = idx * observations[i].size() + per_agent[i];
  return idx;
}

void DecPomdp::decode_joint_action(std::size_t ja, std::span<int> out) const {
  for (int i = n_agents - 1; i >= 0; --i) {
    out[i] = static_cast<int>(ja % actions[i].size());
    ja /= actions[i].size();
  }
}

void DecPomdp::decode_joint_observation(std::size_t jo, std::span<int> out) const {
  for (int i = n_agents - 1; i >= 0; --i) {
    out[i] = static_cast<int>(jo % observations[i].size());
    jo /= observations[i].size();
  }
}

DecPomdp DecPomdp::with_start(StateDistribution b0) const {
  DecPomdp copy = *this;
  copy.start = std::move(b0);
  return copy;
}

void DecPomdp::allocate_tables() {
  const std::size_t S = states.size();
  std::size_t ja = 1, jo = 1;
  for (const auto& a : actions) {
    if (ja > kMaxTableEntries / std::max<std::size_t>(a.size(), 1)) ja = kMaxTableEntries + 1;
    else ja *= a.size();
  }
  for (const auto& o : observations) {
    if (jo > kMaxTableEntries / std::max<std::size_t>(o.size(), 1)) jo = kMaxTableEntries + 1;
    else jo *= o.size();
  }
  if (S == 0 || ja == 0 || jo == 0) throw std::invalid_argument("empty state or action space");
  if (S * ja > kMaxTableEntries / std::max<std::size_t>(S, jo))
    throw std::invalid_argument("model tables too large");
  transition.assign(S * ja * S, 0.0);
  observation.assign(S * ja * jo, 0.0);
  reward.assign(S * ja, 0.0);
  if (start.weights.empty()) start.weights.assign(S, 0.0);
}

namespace {
int index_of(const std::vector<std::string>& names, const std::string& name) {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}
}  // namespace

int DecPomdp::state_index(const std::string& name) const { return index_of(states, name); }
int DecPomdp::action_index(int agent, const std::string& name) const {
  return index_of(actions[agent], name);
}
int DecPomdp::observation_index(int agent, const std::string& name) const {
  return index_of(observations[agent], name);
}

// ---------------------------------------------------------------------------
// validate

std::vector<Violation> validate(const DecPomdp& m) {
  std::vector<Violation> out;
  auto add = [&out](const std::string& what) { out.push_back(Violation{what}); };

  if (m.n_agents < 1) add("n_agents must be >= 1");
  if (m.states.empty()) add("state list is empty");
  if (static_cast<int>(m.actions.size()) != m.n_agents)
    add("action lists do not match n_agents");
  if (static_cast<int>(m.observations.size()) != m.n_agents)
    add("observation lists do not match n_agents");
  for (int i = 0; i < static_cast<int>(m.actions.size()); ++i)
    if (m.actions[i].empty()) add("agent " + std::to_string(i) + " has no actions");
  for (int i = 0; i < static_cast<int>(m.observations.size()); ++i)
    if (m.observations[i].empty()) add("agent " + std::to_string(i) + " has no observations");

  auto check_unique = [&add](const std::vector<std::string>& names, const std::string& what) {
    for (std::size_t i = 0; i < names.size(); ++i)
      for (std::size_t j = i + 1; j < names.size(); ++j)
        if (names[i] == names[j]) add("duplicate " + what + " name '" + names[i] + "'");
  };
  check_unique(m.states, "state");
  for (int i = 0; i < static_cast<int>(m.actions.size()); ++i)
    check_unique(m.actions[i], "action (agent " + std::to_string(i) + ")");
  for (int i = 0; i < static_cast<int>(m.observations.size()); ++i)
    check_unique(m.observations[i], "observation (agent " + std::to_string(i) + ")");

  if (!out.empty()) return out;  // shape is broken; table checks would be nonsense

  const std::size_t S = m.states.size();
  const std::size_t JA = m.num_joint_actions();
  const std::size_t JO = m.num_joint_observations();
  if (m.transition.size() != S * JA * S) {
    add("transition table has wrong size");
    return out;
  }
  if (m.observation.size() != S * JA * JO) {
    add("observation table has wrong size");
    return out;
  }
  if (m.reward.size() != S * JA) {
    add("reward table has wrong size");
    return out;
  }
  if (m.start.weights.size() != S) {
    add("start distribution has wrong size");
    return out;
  }

  auto joint_action_name = [&](std::size_t ja) {
    std::vector<int> a(m.n_agents);
    m.decode_joint_action(ja, a);
    std::string s;
    for (int i = 0; i < m.n_agents; ++i) {
      if (i) s += ' ';
      s += m.actions[i][a[i]];
    }
    return s;
  };

  for (std::size_t s = 0; s < S; ++s) {
    for (std::size_t ja = 0; ja < JA; ++ja) {
      double sum = 0.0;
      for (std::size_t s2 = 0; s2 < S; ++s2) {
        double p = m.trans(static_cast<int>(s), ja, static_cast<int>(s2));
        if (!(p >= 0.0 && p <= 1.0))
          add("transition probability out of [0,1] at (" + m.states[s] + " | " +
              joint_action_name(ja) + " -> " + m.states[s2] + "): " + format_double(p));
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        add("transition row (" + m.states[s] + " | " + joint_action_name(ja) +
            ") sums to " + format_double(sum));
    }
  }
  for (std::size_t s2 = 0; s2 < S; ++s2) {
    for (std::size_t ja = 0; ja < JA; ++ja) {
      double sum = 0.0;
      for (std::size_t jo = 0; jo < JO; ++jo) {
        double p = m.obs(static_cast<int>(s2), ja, jo);
        if (!(p >= 0.0 && p <= 1.0))
          add("observation probability out of [0,1] at (" + m.states[s2] + ", " +
              joint_action_name(ja) + "): " + format_double(p));
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance)
        add("observation row (" + m.states[s2] + " | " + joint_action_name(ja) +
            ") sums to " + format_double(sum));
    }
  }
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t ja = 0; ja < JA; ++ja)
      if (!std::isfinite(m.rew(static_cast<int>(s), ja)))
        add("reward not finite at (" + m.states[s] + ", " + joint_action_name(ja) + ")");

  double start_sum = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    double w = m.start.weights[s];
    if (!(w >= 0.0)) add("negative start probability for state " + m.states[s]);
    start_sum += w;
  }
  if (std::abs(start_sum - 1.0) > kRowSumTolerance)
    add("start distribution sums to " + format_double(start_sum));

  return out;
}

// ---------------------------------------------------------------------------
// parser

namespace {

struct Token {
  std::string text;
  int column = 0;  // 1-based
};

// Splits a line into colon-separated segments of whitespace-separated tokens.
// The comment marker has already been stripped.
std::vector<std::vector<Token>> split_segments(const std::string& line) {
  std::vector<std::vector<Token>> segments(1);
  std::string cur;
  int cur_col = 0;
  auto flush = [&]() {
    if (!cur.empty()) {
      segments.back().push_back(Token{cur, cur_col});
      cur.clear();
    }
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == ':') {
      flush();
      segments.emplace_back();
    } else if (c == ' ' || c == '\t' || c == '\r') {
      flush();
    } else {
      if (cur.empty()) cur_col = static_cast<int>(i) + 1;
      cur += c;
    }
  }
  flush();
  return segments;
}

// Provenance of a table cell, for duplicate detection and override rules.
enum class CellSource : std::uint8_t { unset, wildcard, specific };

class ModelParser {
 public:
  explicit ModelParser(const std::string& text) : text_(text) {}

  DecPomdp run() {
    std::istringstream in(text_);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw.erase(hash);
      auto segs = split_segments(raw);
      if (segs.size() == 1 && segs[0].empty()) continue;  // blank
      parse_line(line_no, segs);
    }
    finish(line_no);
    return std::move(model_);
  }

 private:
  const std::string& text_;
  DecPomdp model_;
  bool have_agents_ = false, have_states_ = false, have_start_ = false;
  std::vector<bool> have_actions_, have_observations_;
  bool tables_ready_ = false;
  std::vector<CellSource> t_source_, o_source_, r_source_;
  // line that last touched each stochastic row, for row-sum error locations
  std::vector<int> t_row_line_, o_row_line_;

  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    throw ParseError(line, col, msg);
  }

  void require_size(int line, const std::vector<Token>& seg, std::size_t n,
                    const std::string& what) const {
    if (seg.size() != n)
      fail(line, seg.empty() ? 0 : seg[0].column,
           what + ": expected " + std::to_string(n) + " value(s), got " +
               std::to_string(seg.size()));
  }

  double parse_number(int line, const Token& tok) const {
    const char* begin = tok.text.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + tok.text.size() || tok.text.empty())
      fail(line, tok.column, "expected a number, got '" + tok.text + "'");
    return v;
  }

  long parse_int(int line, const Token& tok) const {
    const char* begin = tok.text.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end != begin + tok.text.size() || tok.text.empty())
      fail(line, tok.column, "expected an integer, got '" + tok.text + "'");
    return v;
  }

  void check_name(int line, const Token& tok) const {
    if (tok.text == "*" || tok.text.find(':') != std::string::npos)
      fail(line, tok.column, "invalid name '" + tok.text + "'");
  }

  std::vector<std::string> name_list(int line, std::span<const Token> toks) const {
    std::vector<std::string> names;
    names.reserve(toks.size());
    for (const auto& t : toks) {
      check_name(line, t);
      names.push_back(t.text);
    }
    return names;
  }

  void ensure_tables(int line) {
    if (tables_ready_) return;
    if (!have_agents_) fail(line, 0, "'agents:' line must appear before table entries");
    if (!have_states_) fail(line, 0, "'states:' line must appear before table entries");
    if (!have_start_) fail(line, 0, "'start:' line must appear before table entries");
    for (int i = 0; i < model_.n_agents; ++i) {
      if (!have_actions_[i])
        fail(line, 0, "missing 'actions " + std::to_string(i) + ":' line");
      if (!have_observations_[i])
        fail(line, 0, "missing 'observations " + std::to_string(i) + ":' line");
    }
    try {
      model_.allocate_tables();
    } catch (const std::invalid_argument& e) {
      fail(line, 0, e.what());
    }
    const std::size_t S = model_.states.size();
    const std::size_t JA = model_.num_joint_actions();
    const std::size_t JO = model_.num_joint_observations();
    if (S * JA * std::max(S, JO) > kMaxTableEntries) fail(line, 0, "model too large");
    t_source_.assign(S * JA * S, CellSource::unset);
    o_source_.assign(S * JA * JO, CellSource::unset);
    r_source_.assign(S * JA, CellSource::unset);
    t_row_line_.assign(S * JA, 0);
    o_row_line_.assign(S * JA, 0);
    tables_ready_ = true;
  }

  void parse_line(int line, const std::vector<std::vector<Token>>& segs) {
    const auto& head = segs[0];
    if (head.empty()) fail(line, 1, "line starts with ':'");
    const std::string& kw = head[0].text;

    if (kw == "agents") {
      if (segs.size() != 2) fail(line, head[0].column, "malformed 'agents:' line");
      if (have_agents_) fail(line, head[0].column, "duplicate 'agents:' line");
      require_size(line, segs[1], 1, "agents");
      long n = parse_int(line, segs[1][0]);
      if (n < 1 || n > kMaxAgents)
        fail(line, segs[1][0].column, "agent count out of range: " + segs[1][0].text);
      model_.n_agents = static_cast<int>(n);
      model_.actions.resize(n);
      model_.observations.resize(n);
      have_actions_.assign(n, false);
      have_observations_.assign(n, false);
      have_agents_ = true;
    } else if (kw == "states") {
      if (segs.size() != 2 || segs[1].empty())
        fail(line, head[0].column, "malformed 'states:' line");
      if (have_states_) fail(line, head[0].column, "duplicate 'states:' line");
      if (segs[1].size() > kMaxNames) fail(line, head[0].column, "too many states");
      model_.states = name_list(line, segs[1]);
      have_states_ = true;
    } else if (kw == "start") {
      if (!have_states_) fail(line, head[0].column, "'start:' must come after 'states:'");
      if (segs.size() != 2) fail(line, head[0].column, "malformed 'start:' line");
      if (have_start_) fail(line, head[0].column, "duplicate 'start:' line");
      require_size(line, segs[1], model_.states.size(), "start");
      model_.start.weights.clear();
      for (const auto& t : segs[1]) model_.start.weights.push_back(parse_number(line, t));
      have_start_ = true;
    } else if (kw == "actions" || kw == "observations") {
      if (!have_agents_)
        fail(line, head[0].column, "'" + kw + "' line must come after 'agents:'");
      if (head.size() != 2 || segs.size() != 2 || segs[1].empty())
        fail(line, head[0].column, "malformed '" + kw + "' line");
      long agent = parse_int(line, head[1]);
      if (agent < 0 || agent >= model_.n_agents)
        fail(line, head[1].column, "agent index out of range: " + head[1].text);
      if (segs[1].size() > kMaxNames) fail(line, head[0].column, "too many names");
      auto names = name_list(line, segs[1]);
      if (kw == "actions") {
        if (have_actions_[agent])
          fail(line, head[0].column, "duplicate 'actions " + head[1].text + ":' line");
        model_.actions[agent] = std::move(names);
        have_actions_[agent] = true;
      } else {
        if (have_observations_[agent])
          fail(line, head[0].column, "duplicate 'observations " + head[1].text + ":' line");
        model_.observations[agent] = std::move(names);
        have_observations_[agent] = true;
      }
    } else if (kw == "T" || kw == "O" || kw == "R") {
      ensure_tables(line);
      if (head.size() != 1) fail(line, head[1].column, "unexpected token before ':'");
      if (kw == "T") parse_transition(line, segs);
      else if (kw == "O") parse_observation(line, segs);
      else parse_reward(line, segs);
    } else {
      fail(line, head[0].column, "unknown directive '" + kw + "'");
    }
  }

  // Resolves a name token to indices; '*' yields every index of the slot.
  std::vector<int> resolve(int line, const Token& tok, const std::vector<std::string>& names,
                           const std::string& what) const {
    if (tok.text == "*") {
      std::vector<int> all(names.size());
      for (std::size_t i = 0; i < names.size(); ++i) all[i] = static_cast<int>(i);
      return all;
    }
    int idx = index_of(names, tok.text);
    if (idx < 0) fail(line, tok.column, "unknown " + what + " name '" + tok.text + "'");
    return {idx};
  }

  // Cartesian product over per-slot index choices, invoking fn(indices).
  template <typename Fn>
  void for_each_combination(const std::vector<std::vector<int>>& choices, Fn&& fn) const {
    std::vector<int> pick(choices.size(), 0);
    std::vector<int> current(choices.size());
    while (true) {
      for (std::size_t i = 0; i < choices.size(); ++i) current[i] = choices[i][pick[i]];
      fn(current);
      std::size_t i = choices.size();
      while (i > 0) {
        --i;
        if (++pick[i] < static_cast<int>(choices[i].size())) break;
        pick[i] = 0;
        if (i == 0) return;
      }
    }
  }

  void write_cell(int line, int col, std::vector<double>& table,
                  std::vector<CellSource>& source, std::size_t idx, double value,
                  bool is_specific, const std::string& what) {
    if (is_specific && source[idx] == CellSource::specific)
      fail(line, col, "duplicate " + what + " entry for the same index tuple");
    table[idx] = value;
    source[idx] = is_specific ? CellSource::specific : CellSource::wildcard;
  }

  std::vector<std::vector<int>> action_choices(int line, const std::vector<Token>& seg) const {
    std::vector<std::vector<int>> choices(model_.n_agents);
    for (int i = 0; i < model_.n_agents; ++i)
      choices[i] = resolve(line, seg[i], model_.actions[i],
                           "action (agent " + std::to_string(i) + ")");
    return choices;
  }

  void parse_transition(int line, const std::vector<std::vector<Token>>& segs) {
    if (segs.size() != 5) fail(line, 0, "T entry: expected 'T: s : actions : s' : prob'");
    require_size(line, segs[1], 1, "T origin state");
    require_size(line, segs[2], static_cast<std::size_t>(model_.n_agents), "T joint action");
    require_size(line, segs[3], 1, "T destination state");
    require_size(line, segs[4], 1, "T probability");
    auto from = resolve(line, segs[1][0], model_.states, "state");
    auto acts = action_choices(line, segs[2]);
    auto to = resolve(line, segs[3][0], model_.states, "state");
    double p = parse_number(line, segs[4][0]);
    bool specific = segs[1][0].text != "*" && segs[3][0].text != "*" &&
                    std::none_of(segs[2].begin(), segs[2].end(),
                                 [](const Token& t) { return t.text == "*"; });
    const std::size_t S = model_.states.size();
    const std::size_t JA = model_.num_joint_actions();
    std::vector<std::vector<int>> choices;
    choices.push_back(from);
    for (auto& c : acts) choices.push_back(std::move(c));
    choices.push_back(to);
    for_each_combination(choices, [&](const std::vector<int>& ix) {
      std::size_t ja = model_.joint_action_index(
          std::span<const int>(ix.data() + 1, model_.n_agents));
      std::size_t row = ix[0] * JA + ja;
      write_cell(line, segs[4][0].column, model_.transition, t_source_,
                 row * S + ix.back(), p, specific, "transition");
      t_row_line_[row] = line;
    });
  }

  void parse_observation(int line, const std::vector<std::vector<Token>>& segs) {
    if (segs.size() != 5) fail(line, 0, "O entry: expected 'O: s' : actions : obs : prob'");
    require_size(line, segs[1], 1, "O destination state");
    require_size(line, segs[2], static_cast<std::size_t>(model_.n_agents), "O joint action");
    require_size(line, segs[3], static_cast<std::size_t>(model_.n_agents), "O joint observation");
    require_size(line, segs[4], 1, "O probability");
    auto to = resolve(line, segs[1][0], model_.states, "state");
    auto acts = action_choices(line, segs[2]);
    std::vector<std::vector<int>> obs_choices(model_.n_agents);
    for (int i = 0; i < model_.n_agents; ++i)
      obs_choices[i] = resolve(line, segs[3][i], model_.observations[i],
                               "observation (agent " + std::to_string(i) + ")");
    double p = parse_number(line, segs[4][0]);
    bool specific = segs[1][0].text != "*" &&
                    std::none_of(segs[2].begin(), segs[2].end(),
                                 [](const Token& t) { return t.text == "*"; }) &&
                    std::none_of(segs[3].begin(), segs[3].end(),
                                 [](const Token& t) { return t.text == "*"; });
    const std::size_t JA = model_.num_joint_actions();
    const std::size_t JO = model_.num_joint_observations();
    std::vector<std::vector<int>> choices;
    choices.push_back(to);
    for (auto& c : acts) choices.push_back(std::move(c));
    for (auto& c : obs_choices) choices.push_back(std::move(c));
    for_each_combination(choices, [&](const std::vector<int>& ix) {
      std::size_t ja = model_.joint_action_index(
          std::span<const int>(ix.data() + 1, model_.n_agents));
      std::size_t jo = model_.joint_observation_index(
          std::span<const int>(ix.data() + 1 + model_.n_agents, model_.n_agents));
      std::size_t row = ix[0] * JA + ja;
      write_cell(line, segs[4][0].column, model_.observation, o_source_,
                 row * JO + jo, p, specific, "observation");
      o_row_line_[row] = line;
    });
  }

  void parse_reward(int line, const std::vector<std::vector<Token>>& segs) {
    if (segs.size() != 4) fail(line, 0, "R entry: expected 'R: s : actions : reward'");
    require_size(line, segs[1], 1, "R state");
    require_size(line, segs[2], static_cast<std::size_t>(model_.n_agents), "R joint action");
    require_size(line, segs[3], 1, "R value");
    auto from = resolve(line, segs[1][0], model_.states, "state");
    auto acts = action_choices(line, segs[2]);
    double r = parse_number(line, segs[3][0]);
    bool specific = segs[1][0].text != "*" &&
                    std::none_of(segs[2].begin(), segs[2].end(),
                                 [](const Token& t) { return t.text == "*"; });
    const std::size_t JA = model_.num_joint_actions();
    std::vector<std::vector<int>> choices;
    choices.push_back(from);
    for (auto& c : acts) choices.push_back(std::move(c));
    for_each_combination(choices, [&](const std::vector<int>& ix) {
      std::size_t ja = model_.joint_action_index(
          std::span<const int>(ix.data() + 1, model_.n_agents));
      write_cell(line, segs[3][0].column, model_.reward, r_source_, ix[0] * JA + ja, r,
                 specific, "reward");
    });
  }

  void finish(int last_line) {
    ensure_tables(last_line + 1);
    auto violations = validate(model_);
    if (violations.empty()) return;
    // Attach the most useful location we know: the line that last wrote the
    // offending row, 0 for rows no entry ever touched.
    const std::string& first = violations.front().what;
    int line = 0;
    const std::size_t JA = model_.num_joint_actions();
    for (std::size_t s = 0; s < model_.states.size(); ++s)
      for (std::size_t ja = 0; ja < JA; ++ja) {
        double tsum = 0.0, osum = 0.0;
        for (std::size_t s2 = 0; s2 < model_.states.size(); ++s2)
          tsum += m_trans(s, ja, s2);
        for (std::size_t jo = 0; jo < model_.num_joint_observations(); ++jo)
          osum += model_.obs(static_cast<int>(s), ja, jo);
        if (std::abs(tsum - 1.0) > kRowSumTolerance && line == 0)
          line = t_row_line_[s * JA + ja];
        if (std::abs(osum - 1.0) > kRowSumTolerance && line == 0)
          line = o_row_line_[s * JA + ja];
      }
    std::string msg = first;
    if (violations.size() > 1)
      msg += " (+" + std::to_string(violations.size() - 1) + " more violations)";
    throw ParseError(line, 0, msg);
  }

  double m_trans(std::size_t s, std::size_t ja, std::size_t s2) const {
    return model_.trans(static_cast<int>(s), ja, static_cast<int>(s2));
  }
};

}  // namespace

DecPomdp parse_model(const std::string& text) {
  ModelParser parser(text);
  return parser.run();
}

// ---------------------------------------------------------------------------
// serializer

std::string serialize_model(const DecPomdp& m) {
  std::ostringstream out;
  out << "agents: " << m.n_agents << "\n";
  out << "states:";
  for (const auto& s : m.states) out << ' ' << s;
  out << "\nstart:";
  for (double w : m.start.weights) out << ' ' << format_double(w);
  out << "\n";
  for (int i = 0; i < m.n_agents; ++i) {
    out << "actions " << i << ":";
    for (const auto& a : m.actions[i]) out << ' ' << a;
    out << "\n";
  }
  for (int i = 0; i < m.n_agents; ++i) {
    out << "observations " << i << ":";
    for (const auto& o : m.observations[i]) out << ' ' << o;
    out << "\n";
  }
  const std::size_t S = m.states.size();
  const std::size_t JA = m.num_joint_actions();
  const std::size_t JO = m.num_joint_observations();
  auto action_names = [&](std::size_t ja) {
    std::vector<int> a(m.n_agents);
    m.decode_joint_action(ja, a);
    std::string s;
    for (int i = 0; i < m.n_agents; ++i) s += " " + m.actions[i][a[i]];
    return s;
  };
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t ja = 0; ja < JA; ++ja)
      for (std::size_t s2 = 0; s2 < S; ++s2) {
        double p = m.trans(static_cast<int>(s), ja, static_cast<int>(s2));
        if (p != 0.0)
          out << "T: " << m.states[s] << " :" << action_names(ja) << " : " << m.states[s2]
              << " : " << format_double(p) << "\n";
      }
  for (std::size_t s2 = 0; s2 < S; ++s2)
    for (std::size_t ja = 0; ja < JA; ++ja)
      for (std::size_t jo = 0; jo < JO; ++jo) {
        double p = m.obs(static_cast<int>(s2), ja, jo);
        if (p != 0.0) {
          std::vector<int> o(m.n_agents);
          m.decode_joint_observation(jo, o);
          out << "O: " << m.states[s2] << " :" << action_names(ja) << " :";
          for (int i = 0; i < m.n_agents; ++i) out << ' ' << m.observations[i][o[i]];
          out << " : " << format_double(p) << "\n";
        }
      }
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t ja = 0; ja < JA; ++ja) {
      double r = m.rew(static_cast<int>(s), ja);
      if (r != 0.0)
        out << "R: " << m.states[s] << " :" << action_names(ja) << " : " << format_double(r)
            << "\n";
    }
  return out.str();
}

// ---------------------------------------------------------------------------
// built-in benchmark problems

namespace {

DecPomdp make_tiger(bool version_b) {
  DecPomdp m;
  m.n_agents = 2;
  m.states = {"tiger-left", "tiger-right"};
  m.actions = {{"listen", "open-left", "open-right"}, {"listen", "open-left", "open-right"}};
  m.observations = {{"hear-left", "hear-right"}, {"hear-left", "hear-right"}};
  m.allocate_tables();
  m.start = StateDistribution::uniform(2);

  const int listen = 0, open_left = 1, open_right = 2;
  const int hear_left = 0;
  const double kHearCorrect = 0.85;

  std::vector<int> a(2), o(2);
  for (a[0] = 0; a[0] < 3; ++a[0])
    for (a[1] = 0; a[1] < 3; ++a[1]) {
      std::size_t ja = m.joint_action_index(a);
      bool both_listen = a[0] == listen && a[1] == listen;
      for (int s = 0; s < 2; ++s) {
        // transitions: listening keeps the state, any open resets it uniformly
        if (both_listen) {
          m.transition[(s * 9 + ja) * 2 + s] = 1.0;
        } else {
          m.transition[(s * 9 + ja) * 2 + 0] = 0.5;
          m.transition[(s * 9 + ja) * 2 + 1] = 0.5;
        }
        // observations: informative only when both agents listen
        for (o[0] = 0; o[0] < 2; ++o[0])
          for (o[1] = 0; o[1] < 2; ++o[1]) {
            std::size_t jo = m.joint_observation_index(o);
            double p;
            if (both_listen) {
              double p0 = (o[0] == hear_left) == (s == 0) ? kHearCorrect : 1 - kHearCorrect;
              double p1 = (o[1] == hear_left) == (s == 0) ? kHearCorrect : 1 - kHearCorrect;
              p = p0 * p1;
            } else {
              p = 0.25;
            }
            m.observation[(s * 9 + ja) * 4 + jo] = p;
          }
        // rewards
        int tiger_door = (s == 0) ? open_left : open_right;
        int treasure_door = (s == 0) ? open_right : open_left;
        double r;
        if (both_listen) {
          r = -2.0;
        } else if (a[0] == tiger_door && a[1] == tiger_door) {
          r = version_b ? 0.0 : -50.0;
        } else if (a[0] == treasure_door && a[1] == treasure_door) {
          r = 20.0;
        } else if ((a[0] == tiger_door && a[1] == treasure_door) ||
                   (a[0] == treasure_door && a[1] == tiger_door)) {
          r = -100.0;
        } else if (a[0] == tiger_door || a[1] == tiger_door) {
          r = -101.0;  // one opens the tiger door, the other listens
        } else {
          r = 9.0;  // one opens the treasure door, the other listens
        }
        m.reward[s * 9 + ja] = r;
      }
    }
  return m;
}

DecPomdp make_channel() {
  DecPomdp m;
  m.n_agents = 2;
  // state = (agent-1 buffer, agent-2 buffer)
  m.states = {"full-full", "full-empty", "empty-full", "empty-empty"};
  m.actions = {{"send", "wait"}, {"send", "wait"}};
  m.observations = {{"no-collision", "collision"}, {"no-collision", "collision"}};
  m.allocate_tables();
  m.start = StateDistribution::point_mass(4, 0);

  const int send = 0;
  const double refill[2] = {0.9, 0.1};
  const double kObsCorrect = 0.9;

  auto buffer_full = [](int s, int agent) { return agent == 0 ? s < 2 : s % 2 == 0; };

  std::vector<int> a(2), o(2);
  for (a[0] = 0; a[0] < 2; ++a[0])
    for (a[1] = 0; a[1] < 2; ++a[1]) {
      std::size_t ja = m.joint_action_index(a);
      bool collision = a[0] == send && a[1] == send;
      for (int s = 0; s < 4; ++s) {
        bool full[2] = {buffer_full(s, 0), buffer_full(s, 1)};
        bool delivered[2];
        for (int i = 0; i < 2; ++i)
          delivered[i] = a[i] == send && a[1 - i] != send && full[i];
        m.reward[s * 4 + ja] = (delivered[0] || delivered[1]) ? 1.0 : 0.0;
        // per-agent next-buffer distribution; a just-delivered or empty
        // buffer refills within the same step
        double p_full[2];
        for (int i = 0; i < 2; ++i) {
          bool full_after_send = full[i] && !delivered[i];
          p_full[i] = full_after_send ? 1.0 : refill[i];
        }
        for (int s2 = 0; s2 < 4; ++s2) {
          bool full2[2] = {buffer_full(s2, 0), buffer_full(s2, 1)};
          double p = (full2[0] ? p_full[0] : 1 - p_full[0]) *
                     (full2[1] ? p_full[1] : 1 - p_full[1]);
          m.transition[(s * 4 + ja) * 4 + s2] = p;
        }
        // each agent sees a collision bit, correct with probability 0.9,
        // independent of the next state
        for (o[0] = 0; o[0] < 2; ++o[0])
          for (o[1] = 0; o[1] < 2; ++o[1]) {
            std::size_t jo = m.joint_observation_index(o);
            double p0 = (o[0] == 1) == collision ? kObsCorrect : 1 - kObsCorrect;
            double p1 = (o[1] == 1) == collision ? kObsCorrect : 1 - kObsCorrect;
            m.observation[(s * 4 + ja) * 4 + jo] = p0 * p1;
          }
      }
    }
  return m;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"tiger-a", "tiger-b", "channel"};
  return names;
}

DecPomdp builtin(const std::string& name) {
  if (name == "tiger-a") return make_tiger(false);
  if (name == "tiger-b") return make_tiger(true);
  if (name == "channel") return make_channel();
  throw std::invalid_argument("unknown built-in problem '" + name +
                              "' (expected tiger-a, tiger-b or channel)");
}

}  // namespace maastar
