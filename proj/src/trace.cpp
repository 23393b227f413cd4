#include "amtl/trace.hpp"

#include <fstream>
#include <sstream>

#include "amtl/errors.hpp"
#include "amtl/format.hpp"

namespace amtl {

namespace {

constexpr const char* kEventsHeader =
    "task_id,k,request_time,write_time,staleness,objective_after";
constexpr const char* kSummaryHeader =
    "mode,T,d,n,offset,makespan,final_objective,measured_tau,seed";

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void write_file(const std::filesystem::path& file, const std::string& payload) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << payload;
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace

std::string mode_name(Mode mode) { return mode == Mode::Amtl ? "amtl" : "smtl"; }

SummaryRow summary_of(const RunResult& result) {
  SummaryRow row;
  row.mode = mode_name(result.config_echo.mode);
  row.t_count = result.t_count;
  row.dim = result.dim;
  row.n = result.n_first;
  row.offset = result.config_echo.delay_model.offset;
  row.makespan_ns = result.makespan_ns;
  row.final_objective = result.final_objective;
  row.measured_tau = result.measured_tau;
  row.seed = result.config_echo.seed;
  return row;
}

std::string events_csv(const RunResult& result) {
  std::string out(kEventsHeader);
  out += '\n';
  for (const UpdateEvent& e : result.events) {
    out += std::to_string(e.task_id);
    out += ',';
    out += std::to_string(e.k);
    out += ',';
    out += format_ns_as_seconds(e.request_time_ns);
    out += ',';
    out += format_ns_as_seconds(e.write_time_ns);
    out += ',';
    out += std::to_string(e.staleness);
    out += ',';
    if (e.objective_after) out += format_double(*e.objective_after);
    out += '\n';
  }
  return out;
}

std::string summary_csv(const RunResult& result) {
  const SummaryRow row = summary_of(result);
  std::string out(kSummaryHeader);
  out += '\n';
  out += row.mode;
  out += ',';
  out += std::to_string(row.t_count);
  out += ',';
  out += std::to_string(row.dim);
  out += ',';
  out += std::to_string(row.n);
  out += ',';
  out += format_double(row.offset);
  out += ',';
  out += format_ns_as_seconds(row.makespan_ns);
  out += ',';
  out += format_double(row.final_objective);
  out += ',';
  out += std::to_string(row.measured_tau);
  out += ',';
  out += std::to_string(row.seed);
  out += '\n';
  return out;
}

void export_csv(const RunResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  write_file(dir / "events.csv", events_csv(result));
  write_file(dir / "summary.csv", summary_csv(result));
}

SummaryRow parse_summary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string header, line;
  if (!std::getline(in, header) || header != kSummaryHeader) {
    throw ArgumentError("summary.csv: unexpected header '" + header + "'");
  }
  if (!std::getline(in, line) || line.empty()) {
    throw ArgumentError("summary.csv: missing data row");
  }
  const auto fields = split_fields(line);
  if (fields.size() != 9) {
    throw ArgumentError("summary.csv: expected 9 fields, got " +
                        std::to_string(fields.size()));
  }
  SummaryRow row;
  row.mode = std::string(fields[0]);
  row.t_count = parse_uint(fields[1], "summary T");
  row.dim = parse_uint(fields[2], "summary d");
  row.n = parse_uint(fields[3], "summary n");
  row.offset = parse_double(fields[4], "summary offset");
  row.makespan_ns = parse_seconds_to_ns(fields[5], "summary makespan");
  row.final_objective = parse_double(fields[6], "summary final_objective");
  row.measured_tau = parse_uint(fields[7], "summary measured_tau");
  row.seed = parse_uint(fields[8], "summary seed");
  return row;
}

SummaryRow load_summary_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_summary_csv(buf.str());
}

ComparisonSummary compare_report(const RunResult& a, const RunResult& b) {
  if (a.t_count != b.t_count || a.dim != b.dim) {
    throw ArgumentError("compare_report: mismatched problem shapes " +
                        std::to_string(a.dim) + "x" + std::to_string(a.t_count) +
                        " vs " + std::to_string(b.dim) + "x" +
                        std::to_string(b.t_count));
  }
  if (a.events.size() != b.events.size()) {
    throw ArgumentError("compare_report: mismatched update budgets " +
                        std::to_string(a.events.size()) + " vs " +
                        std::to_string(b.events.size()));
  }
  if (b.makespan_ns == 0) {
    throw ArgumentError("compare_report: second run has zero makespan");
  }
  ComparisonSummary cmp;
  cmp.makespan_ratio = static_cast<double>(a.makespan_ns) /
                       static_cast<double>(b.makespan_ns);
  cmp.final_objective_diff = a.final_objective - b.final_objective;
  auto extract_curve = [](const RunResult& r) {
    std::vector<double> curve;
    curve.reserve(r.events.size());
    for (const UpdateEvent& e : r.events) {
      if (!e.objective_after) {
        throw ArgumentError("compare_report: objective trace incomplete; run with "
                            "objective sampling at every update");
      }
      curve.push_back(*e.objective_after);
    }
    return curve;
  };
  cmp.curve_a = extract_curve(a);
  cmp.curve_b = extract_curve(b);
  return cmp;
}

std::string curves_csv(const ComparisonSummary& cmp, const std::string& label_a,
                       const std::string& label_b) {
  std::string out = "k," + label_a + "," + label_b + "\n";
  for (std::size_t k = 0; k < cmp.curve_a.size(); ++k) {
    out += std::to_string(k);
    out += ',';
    out += format_double(cmp.curve_a[k]);
    out += ',';
    out += format_double(cmp.curve_b[k]);
    out += '\n';
  }
  return out;
}

}  // namespace amtl
