// Black-box tests for the amtl binary: flags, exit codes, file outputs.
// The binary path arrives through the AMTL_CLI_BIN environment variable.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "amtl/format.hpp"
#include "amtl/trace.hpp"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

std::string cli_path() {
  const char* env = std::getenv("AMTL_CLI_BIN");
  REQUIRE_MESSAGE(env != nullptr, "AMTL_CLI_BIN must point at the amtl binary");
  return env;
}

CliResult run_cli(const std::string& args) {
  const std::string command = cli_path() + " " + args + " 2>&1";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) {
    result.output.append(buf.data(), n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path temp_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "amtl_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<amtl::SummaryRow> parse_sweep(const std::string& csv) {
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  std::vector<amtl::SummaryRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(amtl::parse_summary_csv(header + "\n" + line + "\n"));
  }
  return rows;
}

}  // namespace

TEST_CASE("gen writes a complete, reproducible task directory") {
  const fs::path dir_a = temp_dir("gen_a");
  const fs::path dir_b = temp_dir("gen_b");
  const std::string flags =
      "gen --tasks 5 --samples 20 --dim 10 --rank 2 --seed 7 --out ";

  CHECK(run_cli(flags + dir_a.string()).exit_code == 0);
  CHECK(fs::exists(dir_a / "manifest.json"));
  for (int t = 0; t < 5; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "task_%03d.csv", t);
    CHECK(fs::exists(dir_a / name));
  }

  CHECK(run_cli(flags + dir_b.string()).exit_code == 0);
  CHECK(slurp(dir_a / "manifest.json") == slurp(dir_b / "manifest.json"));
  CHECK(slurp(dir_a / "task_000.csv") == slurp(dir_b / "task_000.csv"));
  CHECK(slurp(dir_a / "task_004.csv") == slurp(dir_b / "task_004.csv"));
}

TEST_CASE("gen rejects rank 0 with a usage error") {
  const CliResult r = run_cli("gen --tasks 3 --samples 5 --dim 4 --rank 0 --out /tmp/x");
  CHECK(r.exit_code == 2);
}

TEST_CASE("unknown flags exit with code 2") {
  CHECK(run_cli("run --definitely-not-a-flag 1").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("run prints a summary that is a subset of summary.csv") {
  const fs::path out = temp_dir("run_out");
  const CliResult r = run_cli(
      "run --mode amtl --tasks 4 --samples 12 --dim 6 --iters 5 --offset 5 "
      "--seed 3 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const amtl::SummaryRow row = amtl::load_summary_csv(out / "summary.csv");
  CHECK(r.output.find("mode=amtl") != std::string::npos);
  CHECK(r.output.find("makespan=" + amtl::format_ns_as_seconds(row.makespan_ns)) !=
        std::string::npos);
  CHECK(r.output.find("final_objective=" + amtl::format_double(row.final_objective)) !=
        std::string::npos);
  CHECK(r.output.find("measured_tau=" + std::to_string(row.measured_tau)) !=
        std::string::npos);
  CHECK(fs::exists(out / "events.csv"));
}

TEST_CASE("run consumes a generated task directory") {
  const fs::path data = temp_dir("run_data");
  REQUIRE(run_cli("gen --tasks 3 --samples 10 --dim 6 --rank 1 --seed 13 "
                  "--lambda 0.4 --out " + data.string()).exit_code == 0);
  const fs::path out = temp_dir("run_data_out");
  const CliResult r = run_cli("run --mode amtl --data " + data.string() +
                              " --iters 5 --offset 2 --seed 13 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const amtl::SummaryRow row = amtl::load_summary_csv(out / "summary.csv");
  CHECK(row.t_count == 3);
  CHECK(row.dim == 6);
  CHECK(row.n == 10);

  // A directory without a manifest is a data error.
  const fs::path empty = temp_dir("run_data_empty");
  CHECK(run_cli("run --mode amtl --data " + empty.string()).exit_code == 2);
}

TEST_CASE("matched amtl and smtl runs order their makespans") {
  const fs::path out_a = temp_dir("cli_amtl");
  const fs::path out_s = temp_dir("cli_smtl");
  const std::string common =
      " --tasks 5 --samples 20 --dim 10 --iters 10 --offset 5 --seed 11 --out ";
  REQUIRE(run_cli("run --mode amtl" + common + out_a.string()).exit_code == 0);
  REQUIRE(run_cli("run --mode smtl" + common + out_s.string()).exit_code == 0);
  const amtl::SummaryRow a = amtl::load_summary_csv(out_a / "summary.csv");
  const amtl::SummaryRow s = amtl::load_summary_csv(out_s / "summary.csv");
  CHECK(a.makespan_ns < s.makespan_ns);
}

TEST_CASE("rerunning a printed command reproduces the trace bitwise") {
  const fs::path out_a = temp_dir("det_a");
  const fs::path out_b = temp_dir("det_b");
  const std::string common =
      "run --mode amtl --tasks 4 --samples 10 --dim 6 --iters 6 --offset 2 "
      "--jitter 0.5 --seed 21 --out ";
  REQUIRE(run_cli(common + out_a.string()).exit_code == 0);
  REQUIRE(run_cli(common + out_b.string()).exit_code == 0);
  CHECK(slurp(out_a / "events.csv") == slurp(out_b / "events.csv"));
  CHECK(slurp(out_a / "summary.csv") == slurp(out_b / "summary.csv"));
}

TEST_CASE("dynamic step size does not worsen the final objective") {
  const fs::path out_s = temp_dir("dyn_static");
  const fs::path out_d = temp_dir("dyn_dynamic");
  const std::string common =
      " --tasks 5 --samples 20 --dim 10 --iters 10 --offset 15 --seed 5 --out ";
  REQUIRE(run_cli("run --mode amtl" + common + out_s.string()).exit_code == 0);
  REQUIRE(
      run_cli("run --mode amtl --dynamic-step" + common + out_d.string()).exit_code ==
      0);
  const amtl::SummaryRow st = amtl::load_summary_csv(out_s / "summary.csv");
  const amtl::SummaryRow dy = amtl::load_summary_csv(out_d / "summary.csv");
  CHECK(dy.final_objective <= st.final_objective);
}

TEST_CASE("eta-min beyond the relaxation cap is a usage error naming the cap") {
  const CliResult r = run_cli(
      "run --mode amtl --tasks 4 --samples 8 --dim 5 --iters 2 --eta-min 0.95");
  CHECK(r.exit_code == 2);
  CHECK(r.output.find("eta_min") != std::string::npos);
  CHECK(r.output.find("cap") != std::string::npos);
}

TEST_CASE("staleness violations exit with code 3 naming task and update") {
  const CliResult r = run_cli(
      "run --mode amtl --tasks 4 --samples 8 --dim 5 --iters 3 --offset 1 "
      "--tau-max 0");
  CHECK(r.exit_code == 3);
  CHECK(r.output.find("task") != std::string::npos);
  CHECK(r.output.find("k=") != std::string::npos);
}

TEST_CASE("compare emits curves and both traces") {
  const fs::path out = temp_dir("compare");
  const CliResult r = run_cli(
      "compare --tasks 3 --samples 10 --dim 6 --iters 5 --offset 5 --seed 9 "
      "--out " + out.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.output.find("makespan_ratio=") != std::string::npos);
  const std::string curves = slurp(out / "curves.csv");
  CHECK(curves.rfind("k,amtl,smtl\n", 0) == 0);
  // header + one row per update index (iters * T)
  CHECK(std::count(curves.begin(), curves.end(), '\n') == 1 + 5 * 3);
  CHECK(fs::exists(out / "amtl" / "summary.csv"));
  CHECK(fs::exists(out / "smtl" / "summary.csv"));
}

TEST_CASE("bench sweeps tasks with matched pairs") {
  const fs::path out = temp_dir("bench") / "sweep.csv";
  const CliResult r = run_cli(
      "bench --axis tasks --values 5,10,15 --samples 10 --dim 8 --iters 5 "
      "--offset 5 --seed 2 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_sweep(slurp(out));
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    CHECK(rows[i].mode == "amtl");
    CHECK(rows[i + 1].mode == "smtl");
    CHECK(rows[i].t_count == rows[i + 1].t_count);
    CHECK(rows[i].seed == rows[i + 1].seed);
    CHECK(rows[i].makespan_ns < rows[i + 1].makespan_ns);
  }
  CHECK(rows[0].t_count == 5);
  CHECK(rows[2].t_count == 10);
  CHECK(rows[4].t_count == 15);
}

TEST_CASE("bench dim sweep reports a non-shrinking makespan gap") {
  // The gap between the engines is dominated by the delay draws, which vary
  // with the per-point derived seed; this configuration is pinned.
  const fs::path out = temp_dir("bench_dim") / "sweep.csv";
  const CliResult r = run_cli(
      "bench --axis dim --values 10,25,50 --tasks 5 --samples 10 --iters 5 "
      "--offset 5 --seed 9 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_sweep(slurp(out));
  REQUIRE(rows.size() == 6);
  std::int64_t prev_gap = -1;
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    const std::int64_t gap = rows[i + 1].makespan_ns - rows[i].makespan_ns;
    CHECK(gap >= prev_gap);
    prev_gap = gap;
  }
}

TEST_CASE("bench with an empty sweep is a usage error") {
  CHECK(run_cli("bench --axis tasks --values \"\"").exit_code == 2);
  CHECK(run_cli("bench --axis tasks").exit_code == 2);
}

TEST_CASE("run on the real clock completes with a trace") {
  const fs::path out = temp_dir("real_clock");
  const CliResult r = run_cli(
      "run --mode amtl --clock real --tasks 3 --samples 8 --dim 5 --iters 4 "
      "--offset 0.001 --jitter 0.001 --tau-max 50 --seed 6 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  const amtl::SummaryRow row = amtl::load_summary_csv(out / "summary.csv");
  CHECK(row.mode == "amtl");
  CHECK(row.makespan_ns > 0);
  const std::string events = slurp(out / "events.csv");
  CHECK(std::count(events.begin(), events.end(), '\n') == 1 + 4 * 3);
}

TEST_CASE("selftest passes") {
  const CliResult r = run_cli("selftest");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("selftest passed") != std::string::npos);
}

TEST_CASE("help freezes flags and defaults") {
  const CliResult r = run_cli("run --help");
  CHECK(r.exit_code == 0);
  for (const char* flag :
       {"--mode", "--clock", "--iters", "--offset", "--jitter", "--seed",
        "--eta-min", "--c", "--tau-max", "--dynamic-step", "--window",
        "--lambda"}) {
    CHECK(r.output.find(flag) != std::string::npos);
  }
  CHECK(r.output.find("0.0001") != std::string::npos);  // eta_min default
  CHECK(r.output.find("0.9") != std::string::npos);     // c default
}
