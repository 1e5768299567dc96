#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maastar/search.hpp"

namespace maastar {

/// One solver run: configuration plus the resulting statistics. Serializable
/// to CSV with a fixed, versioned column order. Wall-clock time is kept for
/// the human-readable report only; CSV rows contain nothing that varies
/// between identical runs, so reports are byte-reproducible.
struct RunReport {
  std::string problem;  // built-in name or file path
  int horizon = 0;
  std::string heuristic;  // mdp | recursive | brute
  double weight = 1.0;
  double value = 0.0;
  bool proven_optimal = false;
  std::uint64_t evaluated_count = 0;
  std::uint64_t subsearch_evaluated = 0;
  std::size_t max_open_size = 0;
  double wall_seconds = 0.0;  // not serialized
  std::vector<TraceEntry> trace;
};

/// CSV header, column order fixed per format version.
std::string csv_header();

/// One CSV row. The trace column holds `evaluatedIndex:value` pairs joined
/// with ';'. Reals are printed with full precision.
std::string csv_row(const RunReport& report);

/// Parses rows produced by csv_row (header line required). Throws
/// std::runtime_error on malformed input or a version mismatch.
std::vector<RunReport> parse_csv(const std::string& text);

/// Fixed two-decimal rendering used for values in printed tables.
std::string format_value(double v);

/// Human-readable report block for one run.
std::string format_report(const RunReport& report);

/// Published results for the three benchmark problems: optimal value,
/// evaluated policy pairs and max open list size per (problem, horizon,
/// heuristic). Values are enforced by `--compare-paper`; the counts depend
/// on the expansion order and are informational.
struct ReferenceRow {
  const char* problem;
  int horizon;
  const char* heuristic;
  double value;
  std::uint64_t evaluated;
  std::uint64_t max_open;
};

std::span<const ReferenceRow> reference_results();

const ReferenceRow* find_reference(const std::string& problem, int horizon,
                                   const std::string& heuristic);

}  // namespace maastar
