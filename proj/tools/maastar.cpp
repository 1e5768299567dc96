// Command-line front end: solve problems from files or built-ins, run the
// exhaustive oracle, reproduce the benchmark tables, and export policies as
// GraphViz trees.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "maastar/evaluation.hpp"
#include "maastar/model.hpp"
#include "maastar/policy.hpp"
#include "maastar/report.hpp"
#include "maastar/search.hpp"

namespace {

using namespace maastar;

constexpr int kExitOk = 0;
constexpr int kExitModelError = 1;
constexpr int kExitNotProven = 2;

constexpr std::uint64_t kDefaultNodeBudget = 1'000'000'000;

struct ModelArgs {
  std::string file;
  std::string problem;
};

void add_model_options(CLI::App* cmd, ModelArgs& args) {
  auto* file = cmd->add_option("--model", args.file, "model file to solve");
  auto* prob = cmd->add_option("--problem", args.problem,
                               "built-in problem: tiger-a, tiger-b or channel");
  file->excludes(prob);
  prob->excludes(file);
}

// Loads the model or exits with the full violation report.
DecPomdp load_model(const ModelArgs& args, std::string& name_out) {
  if (args.file.empty() && args.problem.empty()) {
    std::cerr << "error: one of --model or --problem is required\n";
    std::exit(kExitModelError);
  }
  try {
    if (!args.problem.empty()) {
      name_out = args.problem;
      return builtin(args.problem);
    }
    std::ifstream in(args.file);
    if (!in) {
      std::cerr << "error: cannot open '" << args.file << "'\n";
      std::exit(kExitModelError);
    }
    std::ostringstream text;
    text << in.rdbuf();
    name_out = args.file;
    DecPomdp model = parse_model(text.str());
    auto violations = validate(model);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << args.file << ": " << v.what << "\n";
      std::exit(kExitModelError);
    }
    return model;
  } catch (const ParseError& e) {
    std::cerr << (args.file.empty() ? args.problem : args.file) << ": " << e.what() << "\n";
    std::exit(kExitModelError);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::exit(kExitModelError);
  }
}

void write_file_or_die(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    std::exit(kExitModelError);
  }
  out << content;
}

void append_csv(const std::string& path, const std::vector<RunReport>& reports) {
  std::ostringstream out;
  out << csv_header() << "\n";
  for (const auto& r : reports) out << csv_row(r) << "\n";
  write_file_or_die(path, out.str());
}

// Self-contained policy file: enough names to re-render the trees without
// the model.
std::string serialize_policy(const std::string& problem, const DecPomdp& model,
                             const PolicyVector& vector, double value) {
  std::ostringstream out;
  out << "# maastar policy v1\n";
  out << "problem: " << problem << "\n";
  out << "agents: " << model.n_agents << "\n";
  out << "depth: " << vector.depth << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  out << "value: " << buf << "\n";
  for (int i = 0; i < model.n_agents; ++i) {
    out << "actions " << i << ":";
    for (const auto& a : model.actions[i]) out << ' ' << a;
    out << "\nobservations " << i << ":";
    for (const auto& o : model.observations[i]) out << ' ' << o;
    out << "\ntree " << i << ":";
    for (int a : vector.trees[i].flat()) out << ' ' << a;
    out << "\n";
  }
  return out.str();
}

struct SavedPolicy {
  int n_agents = 0;
  int depth = 0;
  double value = 0.0;
  std::vector<std::vector<std::string>> actions, observations;
  std::vector<std::vector<int>> trees;
};

SavedPolicy parse_policy(const std::string& text) {
  SavedPolicy p;
  std::istringstream in(text);
  std::string line;
  auto fail = [](const std::string& why) -> void {
    throw std::runtime_error("bad policy file: " + why);
  };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "problem:") continue;
    if (key == "agents:") {
      ls >> p.n_agents;
      p.actions.resize(p.n_agents);
      p.observations.resize(p.n_agents);
      p.trees.resize(p.n_agents);
    } else if (key == "depth:") {
      ls >> p.depth;
    } else if (key == "value:") {
      ls >> p.value;
    } else if (key == "actions" || key == "observations" || key == "tree") {
      int agent = -1;
      std::string idx;
      ls >> idx;
      if (idx.empty() || idx.back() != ':') fail("malformed '" + key + "' line");
      agent = std::stoi(idx);
      if (agent < 0 || agent >= p.n_agents) fail("agent index out of range");
      if (key == "tree") {
        int a;
        while (ls >> a) p.trees[agent].push_back(a);
      } else {
        std::string name;
        auto& dst = key == "actions" ? p.actions[agent] : p.observations[agent];
        while (ls >> name) dst.push_back(name);
      }
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (p.n_agents < 1 || p.depth < 1) fail("missing agents/depth");
  return p;
}

struct RunConfig {
  std::string problem;
  int horizon = 1;
  HeuristicKind kind = HeuristicKind::mdp;
  double weight = 1.0;
  std::uint64_t node_budget = kDefaultNodeBudget;
  double time_budget = 0.0;
  bool anytime_stream = false;
};

struct RunOutcome {
  RunReport report;
  std::optional<PolicyVector> vector;
};

RunOutcome run_search(const DecPomdp& model, const RunConfig& cfg) {
  HeuristicTable table;
  std::uint64_t subsearch = 0;
  if (cfg.kind == HeuristicKind::recursive) {
    RecursiveTableResult built =
        build_recursive_table(model, cfg.horizon, cfg.node_budget, cfg.time_budget);
    table = std::move(built.table);
    subsearch = built.subsearch_evaluated;
  } else {
    table = mdp_values(model, cfg.horizon);
  }

  SearchOptions options;
  options.horizon = cfg.horizon;
  options.weight = cfg.weight;
  options.node_budget = cfg.node_budget;
  options.time_budget_seconds = cfg.time_budget;
  if (cfg.anytime_stream) {
    options.on_incumbent = [](double wall, double value, const PolicyVector&) {
      std::printf("%.6f,%.17g\n", wall, value);
      std::fflush(stdout);
    };
  }

  SearchResult result = cfg.weight < 1.0 ? anytime_run(model, options, table)
                                         : maa_star(model, options, table);

  RunOutcome out;
  out.report.problem = cfg.problem;
  out.report.horizon = cfg.horizon;
  out.report.heuristic = to_string(cfg.kind);
  out.report.weight = cfg.weight;
  out.report.value = result.value;
  out.report.proven_optimal = result.proven_optimal;
  out.report.evaluated_count = result.stats.evaluated_count;
  out.report.subsearch_evaluated = subsearch;
  out.report.max_open_size = result.stats.max_open_size;
  out.report.wall_seconds = result.stats.wall_seconds;
  out.report.trace = result.stats.incumbent_trace;
  out.vector = std::move(result.vector);
  return out;
}

HeuristicKind parse_heuristic(const std::string& name) {
  if (name == "mdp") return HeuristicKind::mdp;
  if (name == "recursive") return HeuristicKind::recursive;
  throw CLI::ValidationError("--heuristic", "expected 'mdp' or 'recursive'");
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int cmd_solve(const ModelArgs& margs, const RunConfig& base, const std::string& csv_path,
              const std::string& policy_path) {
  RunConfig cfg = base;
  DecPomdp model = load_model(margs, cfg.problem);
  try {
    RunOutcome out = run_search(model, cfg);
    std::cout << format_report(out.report);
    if (!csv_path.empty()) append_csv(csv_path, {out.report});
    if (!policy_path.empty()) {
      if (!out.vector) {
        std::cerr << "error: no policy found within the budget; nothing saved\n";
        return kExitNotProven;
      }
      write_file_or_die(policy_path,
                        serialize_policy(cfg.problem, model, *out.vector, out.report.value));
    }
    return out.report.proven_optimal ? kExitOk : kExitNotProven;
  } catch (const BudgetExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNotProven;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  }
}

int cmd_brute(const ModelArgs& margs, int horizon, std::uint64_t cap,
              const std::string& csv_path) {
  std::string name;
  DecPomdp model = load_model(margs, name);
  try {
    auto t0 = std::chrono::steady_clock::now();
    BruteForceResult result = brute_force(model, horizon, cap);
    RunReport report;
    report.problem = name;
    report.horizon = horizon;
    report.heuristic = "brute";
    report.weight = 1.0;
    report.value = result.value;
    report.proven_optimal = true;
    report.evaluated_count = result.enumerated_count;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << format_report(report);
    if (!csv_path.empty()) append_csv(csv_path, {report});
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  }
}

int cmd_bench(const std::string& problem, const std::string& horizons,
              const std::string& heuristics, double weight, std::uint64_t node_budget,
              double time_budget, bool compare_paper, const std::string& csv_path) {
  DecPomdp model = [&] {
    ModelArgs args;
    args.problem = problem;
    std::string name;
    return load_model(args, name);
  }();

  std::vector<RunReport> reports;
  bool mismatch = false;

  std::printf("%-10s %3s %-10s %10s %8s %12s %12s %10s %9s\n", "problem", "T", "heuristic",
              "value", "optimal", "evaluated", "subsearch", "max-open", "time");
  for (const auto& h_name : split_list(heuristics)) {
    HeuristicKind kind = parse_heuristic(h_name);
    for (const auto& horizon_str : split_list(horizons)) {
      RunConfig cfg;
      cfg.problem = problem;
      cfg.horizon = std::stoi(horizon_str);
      cfg.kind = kind;
      cfg.weight = weight;
      cfg.node_budget = node_budget;
      cfg.time_budget = time_budget;
      RunOutcome out = run_search(model, cfg);
      const RunReport& r = out.report;
      std::printf("%-10s %3d %-10s %10s %8s %12llu %12llu %10zu %8.2fs", problem.c_str(),
                  r.horizon, r.heuristic.c_str(), format_value(r.value).c_str(),
                  r.proven_optimal ? "yes" : "NO",
                  static_cast<unsigned long long>(r.evaluated_count),
                  static_cast<unsigned long long>(r.subsearch_evaluated), r.max_open_size,
                  r.wall_seconds);
      if (compare_paper) {
        const ReferenceRow* ref = find_reference(problem, r.horizon, r.heuristic);
        if (ref == nullptr) {
          std::printf("  [no reference]");
        } else if (std::abs(ref->value - r.value) > 0.01) {
          std::printf("  [MISMATCH: reference value %s]", format_value(ref->value).c_str());
          mismatch = true;
        } else {
          std::printf("  [ok: ref value %s, ref evaluated %llu, ref max-open %llu]",
                      format_value(ref->value).c_str(),
                      static_cast<unsigned long long>(ref->evaluated),
                      static_cast<unsigned long long>(ref->max_open));
        }
      }
      std::printf("\n");
      reports.push_back(out.report);
    }
  }
  if (!csv_path.empty()) append_csv(csv_path, reports);
  return mismatch ? kExitModelError : kExitOk;
}

int cmd_export(const std::string& policy_path, std::string out_prefix) {
  std::ifstream in(policy_path);
  if (!in) {
    std::cerr << "error: missing saved policy '" << policy_path << "'\n";
    return kExitModelError;
  }
  std::ostringstream text;
  text << in.rdbuf();
  try {
    SavedPolicy p = parse_policy(text.str());
    if (out_prefix.empty()) out_prefix = policy_path;
    for (int i = 0; i < p.n_agents; ++i) {
      PolicyTree tree(i, static_cast<int>(p.actions[i].size()),
                      static_cast<int>(p.observations[i].size()), p.depth);
      std::size_t k = 0;
      for (int l = 0; l < p.depth; ++l)
        for (std::size_t r = 0; r < tree.level_size(l); ++r) {
          if (k >= p.trees[i].size()) throw std::runtime_error("bad policy file: tree too short");
          tree.set_action(l, r, p.trees[i][k++]);
        }
      std::string dot = policy_tree_dot(tree, p.actions[i], p.observations[i],
                                        "agent" + std::to_string(i));
      std::string path = out_prefix + ".agent" + std::to_string(i) + ".dot";
      write_file_or_die(path, dot);
      std::cout << "wrote " << path << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal solver for finite-horizon decentralized POMDPs"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "best-first search for an optimal joint policy");
  ModelArgs solve_model;
  add_model_options(solve, solve_model);
  RunConfig solve_cfg;
  std::string solve_heuristic = "mdp";
  std::string solve_csv, solve_policy;
  solve->add_option("--horizon", solve_cfg.horizon, "planning horizon")
      ->required()
      ->check(CLI::PositiveNumber);
  solve->add_option("--heuristic", solve_heuristic, "mdp or recursive (default mdp)");
  solve->add_option("--weight", solve_cfg.weight, "selection weight on the heuristic, in (0,1]")
      ->check(CLI::Range(1e-9, 1.0));
  solve->add_option("--node-budget", solve_cfg.node_budget,
                    "stop unproven after this many evaluations (default 1e9)");
  solve->add_option("--time-budget", solve_cfg.time_budget, "stop unproven after SECONDS");
  solve->add_option("--csv", solve_csv, "write the report as CSV to PATH");
  solve->add_option("--save-policy", solve_policy, "write the solved policy to PATH");
  solve->add_flag("--anytime", solve_cfg.anytime_stream,
                  "stream incumbents to stdout as time,value lines");

  // brute
  auto* brute = app.add_subcommand("brute", "exhaustive enumeration oracle");
  ModelArgs brute_model;
  add_model_options(brute, brute_model);
  int brute_horizon = 1;
  std::uint64_t brute_cap = 100'000'000;
  std::string brute_csv;
  brute->add_option("--horizon", brute_horizon, "planning horizon")
      ->required()
      ->check(CLI::PositiveNumber);
  brute->add_option("--cap", brute_cap, "refuse to enumerate more vectors than this");
  brute->add_option("--csv", brute_csv, "write the report as CSV to PATH");

  // bench
  auto* bench = app.add_subcommand("bench", "run a benchmark grid and print the table");
  std::string bench_problem, bench_horizons, bench_heuristics = "mdp,recursive", bench_csv;
  double bench_weight = 1.0;
  std::uint64_t bench_budget = kDefaultNodeBudget;
  double bench_time = 0.0;
  bool bench_compare = false;
  bench->add_option("--problem", bench_problem, "built-in problem")->required();
  bench->add_option("--horizons", bench_horizons, "comma-separated horizons")->required();
  bench->add_option("--heuristic", bench_heuristics, "comma-separated heuristics");
  bench->add_option("--weight", bench_weight, "selection weight")->check(CLI::Range(1e-9, 1.0));
  bench->add_option("--node-budget", bench_budget, "per-run node budget");
  bench->add_option("--time-budget", bench_time, "per-run time budget in seconds");
  bench->add_flag("--compare-paper", bench_compare,
                  "annotate rows with published reference values");
  bench->add_option("--csv", bench_csv, "write all rows as CSV to PATH");

  // export
  auto* exp = app.add_subcommand("export", "render a saved policy as GraphViz trees");
  std::string export_policy, export_out;
  exp->add_option("--policy", export_policy, "policy file written by solve --save-policy")
      ->required();
  exp->add_option("--out", export_out, "output prefix (default: the policy path)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      solve_cfg.kind = parse_heuristic(solve_heuristic);
      return cmd_solve(solve_model, solve_cfg, solve_csv, solve_policy);
    }
    if (brute->parsed()) return cmd_brute(brute_model, brute_horizon, brute_cap, brute_csv);
    if (bench->parsed())
      return cmd_bench(bench_problem, bench_horizons, bench_heuristics, bench_weight,
                       bench_budget, bench_time, bench_compare, bench_csv);
    if (exp->parsed()) return cmd_export(export_policy, export_out);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModelError;
  }
  return kExitOk;
}
