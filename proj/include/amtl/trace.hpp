#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "amtl/runtime.hpp"

namespace amtl {

// The one-row summary.csv schema.
struct SummaryRow {
  std::string mode;
  std::size_t t_count = 0;
  std::size_t dim = 0;
  std::size_t n = 0;
  double offset = 0.0;
  std::int64_t makespan_ns = 0;
  double final_objective = 0.0;
  std::size_t measured_tau = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

std::string mode_name(Mode mode);

SummaryRow summary_of(const RunResult& result);

// CSV payloads as strings; export_csv writes them to events.csv and
// summary.csv under dir. Times are seconds with 9 decimals (exact for the
// integer-nanosecond clocks); other floats use shortest round-trip form.
std::string events_csv(const RunResult& result);
std::string summary_csv(const RunResult& result);
void export_csv(const RunResult& result, const std::filesystem::path& dir);

SummaryRow parse_summary_csv(const std::string& text);
SummaryRow load_summary_csv(const std::filesystem::path& file);

// Side-by-side comparison of two runs over the same problem and update
// budget: makespan ratio a/b, final-objective difference a-b, and the two
// objective traces aligned by global update index.
struct ComparisonSummary {
  double makespan_ratio = 0.0;
  double final_objective_diff = 0.0;
  std::vector<double> curve_a;
  std::vector<double> curve_b;
};

// Requires matched shapes and full objective traces (objective_every == 1).
ComparisonSummary compare_report(const RunResult& a, const RunResult& b);

std::string curves_csv(const ComparisonSummary& cmp, const std::string& label_a,
                       const std::string& label_b);

}  // namespace amtl
