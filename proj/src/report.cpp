#include "maastar/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace maastar {

namespace {

constexpr const char* kCsvVersion = "1";

std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_real(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty())
    throw std::runtime_error("bad real in CSV: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + s.size() || s.empty())
    throw std::runtime_error("bad integer in CSV: '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string csv_header() {
  return "version,problem,horizon,heuristic,weight,value,proven_optimal,"
         "evaluated_count,subsearch_evaluated,max_open_size,trace";
}

std::string csv_row(const RunReport& r) {
  std::ostringstream out;
  out << kCsvVersion << ',' << r.problem << ',' << r.horizon << ',' << r.heuristic << ','
      << full_precision(r.weight) << ',' << full_precision(r.value) << ','
      << (r.proven_optimal ? 1 : 0) << ',' << r.evaluated_count << ','
      << r.subsearch_evaluated << ',' << r.max_open_size << ',';
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    if (i) out << ';';
    out << r.trace[i].evaluated_index << ':' << full_precision(r.trace[i].value);
  }
  return out.str();
}

std::vector<RunReport> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header()) throw std::runtime_error("unexpected CSV header: " + line);
  std::vector<RunReport> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cols = split(line, ',');
    if (cols.size() != 11) throw std::runtime_error("bad CSV row: " + line);
    if (cols[0] != kCsvVersion)
      throw std::runtime_error("unsupported CSV format version " + cols[0]);
    RunReport r;
    r.problem = cols[1];
    r.horizon = static_cast<int>(parse_u64(cols[2]));
    r.heuristic = cols[3];
    r.weight = parse_real(cols[4]);
    r.value = parse_real(cols[5]);
    r.proven_optimal = cols[6] == "1";
    r.evaluated_count = parse_u64(cols[7]);
    r.subsearch_evaluated = parse_u64(cols[8]);
    r.max_open_size = parse_u64(cols[9]);
    if (!cols[10].empty()) {
      for (const auto& item : split(cols[10], ';')) {
        auto colon = item.find(':');
        if (colon == std::string::npos)
          throw std::runtime_error("bad trace item in CSV: '" + item + "'");
        TraceEntry t;
        t.evaluated_index = parse_u64(item.substr(0, colon));
        t.value = parse_real(item.substr(colon + 1));
        r.trace.push_back(t);
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string format_report(const RunReport& r) {
  std::ostringstream out;
  out << "problem:             " << r.problem << "\n"
      << "horizon:             " << r.horizon << "\n"
      << "heuristic:           " << r.heuristic << "\n"
      << "weight:              " << full_precision(r.weight) << "\n"
      << "value:               " << format_value(r.value) << "\n"
      << "proven optimal:      " << (r.proven_optimal ? "yes" : "no") << "\n"
      << "evaluated:           " << r.evaluated_count << "\n";
  if (r.subsearch_evaluated)
    out << "subsearch evaluated: " << r.subsearch_evaluated << " (total "
        << r.evaluated_count + r.subsearch_evaluated << ")\n";
  out << "max open list size:  " << r.max_open_size << "\n"
      << "wall time:           " << format_value(r.wall_seconds) << " s\n";
  return out.str();
}

std::span<const ReferenceRow> reference_results() {
  static const ReferenceRow rows[] = {
      {"tiger-a", 2, "mdp", -4.00, 252, 8},
      {"tiger-a", 3, "mdp", 5.19, 105228, 248},
      {"tiger-a", 4, "mdp", 4.80, 944512102, 19752},
      {"tiger-b", 2, "mdp", 20.00, 171, 8},
      {"tiger-b", 3, "mdp", 30.00, 26496, 168},
      {"tiger-b", 4, "mdp", 40.00, 344426508, 26488},
      {"channel", 2, "mdp", 2.00, 9, 3},
      {"channel", 3, "mdp", 2.99, 1044, 10},
      {"channel", 4, "mdp", 3.89, 33556500, 1038},
      {"tiger-a", 2, "recursive", -4.00, 252, 8},
      {"tiger-a", 3, "recursive", 5.19, 105066, 88},
      {"tiger-a", 4, "recursive", 4.80, 879601444, 18020},
      {"tiger-b", 2, "recursive", 20.00, 171, 8},
      {"tiger-b", 3, "recursive", 30.00, 26415, 158},
      {"tiger-b", 4, "recursive", 40.00, 344400183, 25102},
      {"channel", 2, "recursive", 2.00, 9, 3},
      {"channel", 3, "recursive", 2.99, 263, 6},
      {"channel", 4, "recursive", 3.89, 16778260, 461},
  };
  return rows;
}

const ReferenceRow* find_reference(const std::string& problem, int horizon,
                                   const std::string& heuristic) {
  for (const auto& row : reference_results())
    if (problem == row.problem && horizon == row.horizon && heuristic == row.heuristic)
      return &row;
  return nullptr;
}

}  // namespace maastar
