// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fails.
// `--long` adds the hours-scale horizon-4 tiger runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "maastar/evaluation.hpp"
#include "maastar/heuristics.hpp"
#include "maastar/model.hpp"
#include "maastar/policy.hpp"
#include "maastar/report.hpp"
#include "maastar/search.hpp"
#include "support.hpp"

using namespace maastar;

namespace {

struct Criterion {
  explicit Criterion(int n) : number(n) {}
  int number;
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "\n    FAILED: " << what;
    }
  }
};

struct RunSpec {
  const char* problem;
  int horizon;
  HeuristicKind kind;
  double expected_value;
  double time_limit_seconds;
};

struct RunOutcome {
  RunReport report;
  SearchResult result;
};

RunOutcome run_config(const DecPomdp& model, const std::string& problem, int horizon,
                      HeuristicKind kind, double weight = 1.0) {
  HeuristicTable table;
  std::uint64_t subsearch = 0;
  if (kind == HeuristicKind::recursive) {
    RecursiveTableResult built = build_recursive_table(model, horizon);
    table = std::move(built.table);
    subsearch = built.subsearch_evaluated;
  } else {
    table = mdp_values(model, horizon);
  }
  SearchOptions options;
  options.horizon = horizon;
  options.weight = weight;
  RunOutcome out;
  out.result = maa_star(model, options, table);
  out.report.problem = problem;
  out.report.horizon = horizon;
  out.report.heuristic = to_string(kind);
  out.report.weight = weight;
  out.report.value = out.result.value;
  out.report.proven_optimal = out.result.proven_optimal;
  out.report.evaluated_count = out.result.stats.evaluated_count;
  out.report.subsearch_evaluated = subsearch;
  out.report.max_open_size = out.result.stats.max_open_size;
  out.report.wall_seconds = out.result.stats.wall_seconds;
  out.report.trace = out.result.stats.incumbent_trace;
  return out;
}

const std::vector<RunSpec>& desk_scale_specs() {
  static const std::vector<RunSpec> specs = {
      {"tiger-a", 2, HeuristicKind::mdp, -4.00, 60.0},
      {"tiger-a", 3, HeuristicKind::mdp, 5.19, 60.0},
      {"tiger-b", 2, HeuristicKind::mdp, 20.00, 60.0},
      {"tiger-b", 3, HeuristicKind::mdp, 30.00, 60.0},
      {"channel", 2, HeuristicKind::mdp, 2.00, 60.0},
      {"channel", 3, HeuristicKind::mdp, 2.99, 60.0},
      {"channel", 4, HeuristicKind::recursive, 3.89, 900.0},
  };
  return specs;
}

char fuzz_printable(std::mt19937_64& rng) {
  static const char alphabet[] =
      "abcdefghijklmnopqrstuvwxyz0123456789 :*.#-+eE\t";
  return alphabet[rng() % (sizeof(alphabet) - 1)];
}

std::string mutate_document(const std::string& seed, std::mt19937_64& rng) {
  std::string doc = seed;
  const int edits = 1 + static_cast<int>(rng() % 3);
  for (int e = 0; e < edits; ++e) {
    if (doc.empty()) break;
    switch (rng() % 10) {
      case 0: {  // delete a random line
        std::vector<std::string> lines;
        std::istringstream in(doc);
        std::string l;
        while (std::getline(in, l)) lines.push_back(l);
        if (lines.empty()) break;
        lines.erase(lines.begin() + rng() % lines.size());
        std::ostringstream out;
        for (const auto& s : lines) out << s << "\n";
        doc = out.str();
        break;
      }
      case 1: {  // duplicate a random line
        std::vector<std::string> lines;
        std::istringstream in(doc);
        std::string l;
        while (std::getline(in, l)) lines.push_back(l);
        if (lines.empty()) break;
        lines.insert(lines.begin() + rng() % lines.size(), lines[rng() % lines.size()]);
        std::ostringstream out;
        for (const auto& s : lines) out << s << "\n";
        doc = out.str();
        break;
      }
      case 2:  // flip one character
        doc[rng() % doc.size()] = fuzz_printable(rng);
        break;
      case 3:  // truncate
        doc.resize(rng() % doc.size());
        break;
      case 4: {  // insert junk
        std::string junk;
        for (int k = 0; k < 12; ++k) junk += fuzz_printable(rng);
        doc.insert(rng() % doc.size(), junk);
        break;
      }
      case 5: {  // perturb a digit
        std::size_t pos = rng() % doc.size();
        for (std::size_t i = pos; i < doc.size(); ++i)
          if (std::isdigit(static_cast<unsigned char>(doc[i]))) {
            doc[i] = static_cast<char>('0' + (rng() % 10));
            break;
          }
        break;
      }
      case 6:  // wildcard something
        doc[rng() % doc.size()] = '*';
        break;
      case 7: {  // huge number
        std::size_t pos = rng() % doc.size();
        doc.insert(pos, "1e999");
        break;
      }
      case 8: {  // benign: insert a comment or blank line at a line boundary
        std::size_t pos = doc.find('\n', rng() % doc.size());
        if (pos != std::string::npos)
          doc.insert(pos + 1, (rng() % 2) ? "# comment\n" : "\n");
        break;
      }
      case 9: {  // swap two whole lines
        std::vector<std::string> lines;
        std::istringstream in(doc);
        std::string l;
        while (std::getline(in, l)) lines.push_back(l);
        if (lines.size() < 2) break;
        std::swap(lines[rng() % lines.size()], lines[rng() % lines.size()]);
        std::ostringstream out;
        for (const auto& s : lines) out << s << "\n";
        doc = out.str();
        break;
      }
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------

void criterion_1_and_7(Criterion& c1, Criterion& c7, std::vector<RunOutcome>& first_runs) {
  for (const RunSpec& spec : desk_scale_specs()) {
    DecPomdp model = builtin(spec.problem);
    auto t0 = std::chrono::steady_clock::now();
    RunOutcome out = run_config(model, spec.problem, spec.horizon, spec.kind);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream label;
    label << spec.problem << " T=" << spec.horizon << " (" << to_string(spec.kind) << ")";
    c1.require(out.result.proven_optimal, label.str() + " not proven optimal");
    c1.require(std::abs(out.report.value - spec.expected_value) <= 0.01,
               label.str() + " value " + format_value(out.report.value) + " != expected " +
                   format_value(spec.expected_value));
    c1.require(wall < spec.time_limit_seconds,
               label.str() + " took " + std::to_string(wall) + " s, limit " +
                   std::to_string(spec.time_limit_seconds));
    c1.detail << "\n    " << label.str() << ": value " << format_value(out.report.value)
              << ", evaluated " << out.report.evaluated_count << " (+"
              << out.report.subsearch_evaluated << " subsearch), max open "
              << out.report.max_open_size << ", " << format_value(wall) << " s";
    first_runs.push_back(std::move(out));
  }

  // criterion 7: a second full run of every configuration must serialize to
  // byte-identical CSV
  for (std::size_t i = 0; i < desk_scale_specs().size(); ++i) {
    const RunSpec& spec = desk_scale_specs()[i];
    DecPomdp model = builtin(spec.problem);
    RunOutcome again = run_config(model, spec.problem, spec.horizon, spec.kind);
    std::string row1 = csv_row(first_runs[i].report);
    std::string row2 = csv_row(again.report);
    c7.require(row1 == row2, std::string(spec.problem) + " T=" + std::to_string(spec.horizon) +
                                 " CSV differs between runs:\n      " + row1 + "\n      " + row2);
  }
  c7.detail << "\n    " << desk_scale_specs().size()
            << " configurations re-run; all CSV rows byte-identical";
}

void criterion_2(Criterion& c) {
  DecPomdp channel = builtin("channel");
  RunOutcome mdp = run_config(channel, "channel", 3, HeuristicKind::mdp);
  RunOutcome rec = run_config(channel, "channel", 3, HeuristicKind::recursive);
  const std::uint64_t brute_pairs = brute_force_count(channel, 3);
  c.require(brute_pairs == 16384, "channel T=3 brute pair count changed");
  c.require(rec.report.evaluated_count <= mdp.report.evaluated_count,
            "recursive evaluated more main-search nodes than mdp");
  c.require(mdp.report.evaluated_count * 5 < brute_pairs,
            "mdp heuristic evaluated >= 20% of the brute-force pairs");
  c.detail << "\n    evaluated: mdp " << mdp.report.evaluated_count << " (reference 1044), "
           << "recursive " << rec.report.evaluated_count << " (+"
           << rec.report.subsearch_evaluated << " subsearch; reference 263), brute "
           << brute_pairs;
}

void criterion_3(Criterion& c) {
  const double weights[] = {0.5, 0.8, 1.0};
  const HeuristicKind kinds[] = {HeuristicKind::mdp, HeuristicKind::recursive};
  int runs = 0;

  auto check_instance = [&](const DecPomdp& m, const std::string& name, int T) {
    BruteForceResult oracle = brute_force(m, T);
    for (HeuristicKind kind : kinds) {
      for (double w : weights) {
        RunOutcome out = run_config(m, name, T, kind, w);
        ++runs;
        c.require(out.result.proven_optimal,
                  name + " T=" + std::to_string(T) + " not proven");
        c.require(std::abs(out.report.value - oracle.value) <= 1e-9,
                  name + " T=" + std::to_string(T) + " " + to_string(kind) + " w=" +
                      std::to_string(w) + ": " + std::to_string(out.report.value) +
                      " != brute " + std::to_string(oracle.value));
      }
    }
  };

  for (const auto& name : builtin_names()) check_instance(builtin(name), name, 2);
  check_instance(builtin("channel"), "channel", 3);

  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DecPomdp m = testsupport::random_model(seed);
    for (int T = 1; T <= 3; ++T) check_instance(m, "random-" + std::to_string(seed), T);
  }
  c.detail << "\n    " << runs << " searches matched the exhaustive oracle to 1e-9";
}

void criterion_4(Criterion& c) {
  int h_checks = 0, row_checks = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DecPomdp m = testsupport::random_model(seed);

    // value-function rows: mdp >= optimum, recursive == optimum (t = 1..3)
    HeuristicTable mdp = mdp_values(m, 4);
    HeuristicTable rec = build_recursive_table(m, 4).table;
    for (int t = 1; t <= 3; ++t) {
      for (int s = 0; s < m.num_states(); ++s) {
        DecPomdp sub = m.with_start(StateDistribution::point_mass(m.states.size(), s));
        double opt = -std::numeric_limits<double>::infinity();
        for (const auto& v : testsupport::all_vectors(sub, t))
          opt = std::max(opt, evaluate(sub, v));
        c.require(mdp.at(t, s) >= opt - 1e-9,
                  "seed " + std::to_string(seed) + ": mdp row " + std::to_string(t) +
                      " below the optimum");
        c.require(std::abs(rec.at(t, s) - opt) <= 1e-9,
                  "seed " + std::to_string(seed) + ": recursive row " + std::to_string(t) +
                      " != optimum");
        ++row_checks;
      }
    }

    // H dominates every completion value, exhaustively, T in {2, 3}
    for (int T = 2; T <= 3; ++T) {
      HeuristicTable mdp_t = mdp_values(m, T);
      HeuristicTable rec_t = build_recursive_table(m, T).table;
      for (int t = 0; t < T; ++t) {
        auto prefixes = t == 0 ? std::vector<PolicyVector>{PolicyVector::empty(m)}
                               : testsupport::all_vectors(m, t);
        for (const auto& prefix : prefixes) {
          double prefix_value = evaluate(m, prefix);
          double h_mdp = heuristic_value(m, prefix, mdp_t, T);
          double h_rec = heuristic_value(m, prefix, rec_t, T);
          for (const auto& comp : testsupport::all_completions(m, t, T - t)) {
            double cv = evaluate(m, stitch(prefix, comp)) - prefix_value;
            c.require(h_mdp >= cv - 1e-9, "seed " + std::to_string(seed) + ": mdp H below a completion value");
            c.require(h_rec >= cv - 1e-9, "seed " + std::to_string(seed) + ": recursive H below a completion value");
            ++h_checks;
          }
        }
        if (!c.pass) return;  // the detail already names the first failure
      }
    }
  }
  c.detail << "\n    " << row_checks << " table rows and " << h_checks
           << " completion bounds verified at 1e-9";
}

void criterion_5(Criterion& c) {
  // exhaustive on channel at horizon 2
  DecPomdp channel = builtin("channel");
  int checks = 0;
  for (const auto& prefix : testsupport::all_vectors(channel, 1)) {
    double pv = evaluate(channel, prefix);
    for (const auto& comp : testsupport::all_completions(channel, 1, 1)) {
      double whole = evaluate(channel, stitch(prefix, comp));
      double parts = pv + completion_value(channel, prefix, comp);
      c.require(std::abs(whole - parts) <= 1e-9, "channel decomposition identity violated");
      ++checks;
    }
  }

  // sampled on random models
  std::mt19937_64 rng(1234);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DecPomdp m = testsupport::random_model(seed);
    auto prefixes = testsupport::all_vectors(m, 1);
    auto completions = testsupport::all_completions(m, 1, 2);
    for (int k = 0; k < 10; ++k) {
      const auto& prefix = prefixes[rng() % prefixes.size()];
      const auto& comp = completions[rng() % completions.size()];
      double whole = evaluate(m, stitch(prefix, comp));
      double parts = evaluate(m, prefix) + completion_value(m, prefix, comp);
      c.require(std::abs(whole - parts) <= 1e-9,
                "seed " + std::to_string(seed) + ": decomposition identity violated");
      ++checks;
    }
  }
  c.detail << "\n    " << checks << " prefix/completion identities verified at 1e-9";
}

void criterion_6(Criterion& c) {
  DecPomdp channel = builtin("channel");
  RunOutcome plain = run_config(channel, "channel", 3, HeuristicKind::mdp, 1.0);
  for (double w : {0.5, 0.8}) {
    RunOutcome out = run_config(channel, "channel", 3, HeuristicKind::mdp, w);
    const auto& trace = out.report.trace;
    c.require(!trace.empty(), "w=" + std::to_string(w) + ": empty incumbent trace");
    for (std::size_t i = 1; i < trace.size(); ++i)
      c.require(trace[i].value > trace[i - 1].value,
                "w=" + std::to_string(w) + ": trace not strictly increasing");
    c.require(out.report.value == plain.report.value,
              "w=" + std::to_string(w) + ": final value differs from the w=1 run");
    if (!trace.empty()) {
      double frac = static_cast<double>(trace.front().evaluated_index) /
                    static_cast<double>(out.report.evaluated_count);
      c.require(frac <= 0.05, "w=" + std::to_string(w) + ": first incumbent after " +
                                  std::to_string(100 * frac) + "% of evaluations");
      c.detail << "\n    w=" << w << ": first incumbent at node "
               << trace.front().evaluated_index << " of " << out.report.evaluated_count
               << ", final " << format_value(out.report.value);
    }
  }
}

void criterion_8(Criterion& c) {
  std::vector<std::string> seeds;
  for (const auto& name : builtin_names()) seeds.push_back(serialize_model(builtin(name)));
  seeds.push_back(serialize_model(testsupport::random_model(99)));
  seeds.push_back(
      "agents: 1\nstates: s\nstart: 1\nactions 0: a\nobservations 0: o\n"
      "T: s : a : s : 1\nO: s : a : o : 1\n");

  std::mt19937_64 rng(20260808);
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 1200; ++i) {
    std::string doc = mutate_document(seeds[i % seeds.size()], rng);
    try {
      DecPomdp m = parse_model(doc);
      ++accepted;
      auto violations = validate(m);
      c.require(violations.empty(), "fuzz case " + std::to_string(i) +
                                        " accepted but fails validate: " +
                                        (violations.empty() ? "" : violations[0].what));
    } catch (const ParseError& e) {
      ++rejected;
      c.require(std::strstr(e.what(), "line") != nullptr,
                "fuzz case " + std::to_string(i) + " rejection lacks a location: " + e.what());
    }
    if (!c.pass) break;
  }
  c.detail << "\n    1200 mutated documents: " << accepted << " accepted (all validate), "
           << rejected << " rejected (all with locations)";
}

void long_horizon_runs(Criterion& c) {
  const RunSpec specs[] = {
      {"tiger-a", 4, HeuristicKind::recursive, 4.80, 0.0},
      {"tiger-b", 4, HeuristicKind::recursive, 40.00, 0.0},
  };
  for (const RunSpec& spec : specs) {
    DecPomdp model = builtin(spec.problem);
    RunOutcome out = run_config(model, spec.problem, spec.horizon, spec.kind);
    c.require(out.result.proven_optimal,
              std::string(spec.problem) + " T=4 not proven optimal");
    c.require(std::abs(out.report.value - spec.expected_value) <= 0.01,
              std::string(spec.problem) + " T=4 value " + format_value(out.report.value));
    c.detail << "\n    " << spec.problem << " T=4: value " << format_value(out.report.value)
             << ", evaluated " << out.report.evaluated_count << ", max open "
             << out.report.max_open_size << ", " << format_value(out.report.wall_seconds)
             << " s";
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool long_runs = false;
  for (int i = 1; i < argc; ++i)
    if (std::string(argv[i]) == "--long") long_runs = true;

  std::vector<Criterion> criteria;
  for (int i = 1; i <= 8; ++i) criteria.emplace_back(i);

  std::vector<RunOutcome> first_runs;
  criterion_1_and_7(criteria[0], criteria[6], first_runs);
  criterion_2(criteria[1]);
  criterion_3(criteria[2]);
  criterion_4(criteria[3]);
  criterion_5(criteria[4]);
  criterion_6(criteria[5]);
  criterion_8(criteria[7]);

  const char* names[] = {
      "optimal benchmark values at desk scale",
      "heuristic comparison on channel T=3",
      "oracle equivalence across heuristics and weights",
      "admissibility of tables and of H",
      "value decomposition identity",
      "anytime behavior with weighted selection",
      "deterministic byte-identical CSV reports",
      "parser robustness under fuzzing",
  };

  bool all_pass = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::printf("criterion %zu (%s): %s%s\n", i + 1, names[i],
                criteria[i].pass ? "PASS" : "FAIL", criteria[i].detail.str().c_str());
    all_pass = all_pass && criteria[i].pass;
  }

  if (long_runs) {
    Criterion c(9);
    long_horizon_runs(c);
    std::printf("long horizon-4 tiger runs (opt-in): %s%s\n", c.pass ? "PASS" : "FAIL",
                c.detail.str().c_str());
    all_pass = all_pass && c.pass;
  }

  return all_pass ? 0 : 1;
}
