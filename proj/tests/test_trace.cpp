#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "amtl/data.hpp"
#include "amtl/errors.hpp"
#include "amtl/format.hpp"
#include "amtl/trace.hpp"
#include "oracles.hpp"

using namespace amtl;

namespace {

std::filesystem::path temp_dir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / "amtl_trace" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

RunResult small_run(Mode mode, std::size_t objective_every = 0) {
  const SyntheticSpec spec{3, 12, 6, 2, 0.1, 61, LossKind::Squared};
  const MtlProblem p = gen_synthetic(spec).problem;
  RunConfig cfg;
  cfg.mode = mode;
  cfg.iterations_per_task = 8;
  cfg.step_policy.tau_max = 10;
  cfg.delay_model.offset = 5.0;
  cfg.delay_model.jitter_scale = 1.0;
  cfg.delay_model.seed = 17;
  cfg.seed = 17;
  cfg.objective_every = objective_every;
  return run(p, cfg);
}

}  // namespace

TEST_CASE("format_double round-trips doubles exactly") {
  Rng rng(71);
  for (int i = 0; i < 200; ++i) {
    const double v = (rng.uniform01() - 0.5) * std::pow(10.0, rng.uniform_below(12));
    CHECK(parse_double(format_double(v), "test") == v);
  }
}

TEST_CASE("nanosecond timestamps serialize losslessly at 9 decimals") {
  for (const std::int64_t ns : {0LL, 1LL, 999999999LL, 5123456789LL, 86400000000000LL}) {
    const std::string s = format_ns_as_seconds(ns);
    CHECK(s.find('.') != std::string::npos);
    CHECK(s.size() - s.find('.') - 1 == 9);
    CHECK(parse_seconds_to_ns(s, "test") == ns);
  }
}

TEST_CASE("empty event list gives a header-only events.csv") {
  RunResult r;
  r.config_echo.mode = Mode::Amtl;
  const std::string csv = events_csv(r);
  CHECK(csv == "task_id,k,request_time,write_time,staleness,objective_after\n");
}

TEST_CASE("summary has exactly one data row") {
  const RunResult r = small_run(Mode::Amtl);
  const std::string csv = summary_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
}

TEST_CASE("export then parse reproduces every summary field") {
  const RunResult r = small_run(Mode::Amtl);
  const auto dir = temp_dir("roundtrip");
  export_csv(r, dir);
  CHECK(std::filesystem::exists(dir / "events.csv"));
  const SummaryRow parsed = load_summary_csv(dir / "summary.csv");
  CHECK(parsed == summary_of(r));
}

TEST_CASE("events.csv leaves unsampled objectives empty") {
  const RunResult r = small_run(Mode::Amtl);  // default sampling: every T
  std::istringstream in(events_csv(r));
  std::string line;
  std::getline(in, line);  // header
  std::size_t row = 0;
  while (std::getline(in, line)) {
    const bool ends_empty = line.back() == ',';
    if ((row + 1) % 3 == 0) {
      CHECK(!ends_empty);
    } else {
      CHECK(ends_empty);
    }
    ++row;
  }
  CHECK(row == r.events.size());
}

TEST_CASE("compare_report of a run against itself") {
  const RunResult r = small_run(Mode::Amtl, 1);
  const ComparisonSummary cmp = compare_report(r, r);
  CHECK(cmp.makespan_ratio == 1.0);
  CHECK(cmp.final_objective_diff == 0.0);
  CHECK(cmp.curve_a == cmp.curve_b);
}

TEST_CASE("compare_report aligns full-resolution curves") {
  const RunResult a = small_run(Mode::Amtl, 1);
  const RunResult b = small_run(Mode::Smtl, 1);
  const ComparisonSummary cmp = compare_report(a, b);
  CHECK(cmp.curve_a.size() == 8 * 3);  // iterations_per_task * T
  CHECK(cmp.curve_b.size() == 8 * 3);
  CHECK(cmp.makespan_ratio < 1.0);  // amtl finishes first under these delays

  const std::string csv = curves_csv(cmp, "amtl", "smtl");
  CHECK(csv.rfind("k,amtl,smtl\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);
}

TEST_CASE("compare_report validates its inputs") {
  const RunResult a = small_run(Mode::Amtl, 1);
  RunResult wrong_shape = a;
  wrong_shape.dim += 1;
  CHECK_THROWS_AS(compare_report(a, wrong_shape), ArgumentError);

  const RunResult sparse = small_run(Mode::Smtl);  // objective sampled every T
  CHECK_THROWS_AS(compare_report(a, sparse), ArgumentError);
}

TEST_CASE("io failures carry the path") {
  const RunResult r = small_run(Mode::Amtl);
  try {
    export_csv(r, "/proc/definitely_not_writable/amtl");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("amtl") != std::string::npos);
  }
}
