// Batch entry point: generate data, run AMTL/SMTL experiments, compare the
// engines, sweep problem sizes, and sanity-check the build.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "amtl/data.hpp"
#include "amtl/errors.hpp"
#include "amtl/format.hpp"
#include "amtl/operators.hpp"
#include "amtl/rng.hpp"
#include "amtl/runtime.hpp"
#include "amtl/trace.hpp"

namespace {

using namespace amtl;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct ProblemFlags {
  std::string data_dir;
  std::size_t tasks = 5;
  std::size_t samples = 100;
  std::size_t dim = 50;
  std::int64_t rank = -1;  // -1: ceil(min(dim, tasks) / 5)
  double noise = 0.0;
  std::string loss = "squared";
  double lambda = 1.0;
  std::string regularizer = "nuclear";
  double l2_augment = 0.0;
};

struct RunFlags {
  std::string mode = "amtl";
  std::string clock = "virtual";
  std::size_t iterations = 10;
  double offset = 5.0;
  double jitter = 1.0;
  std::uint64_t seed = 0;
  double eta = 0.0;  // 0: use eta_scale / L
  double eta_scale = 1.0;
  double eta_min = 1e-4;
  double c = 0.9;
  std::int64_t tau_max = -1;  // -1: 2 * T
  bool dynamic = false;
  std::size_t window = 5;
  std::size_t objective_every = 0;  // 0: every T updates
  double kappa_grad = 1e-8;
  double kappa_svd = 1e-8;
  std::int64_t slow_task = -1;
  double slow_offset = -1.0;  // -1: 10 * offset
};

void add_problem_flags(CLI::App* cmd, ProblemFlags& p, bool with_data_dir) {
  if (with_data_dir) {
    cmd->add_option("--data", p.data_dir,
                    "Task directory with manifest.json (overrides the synthetic flags)");
  }
  cmd->add_option("--tasks", p.tasks, "Number of synthetic tasks T")
      ->capture_default_str();
  cmd->add_option("--samples", p.samples, "Samples per synthetic task")
      ->capture_default_str();
  cmd->add_option("--dim", p.dim, "Model dimensionality d")->capture_default_str();
  cmd->add_option("--rank", p.rank,
                  "Rank of the generating model (default: ceil(min(d,T)/5))")
      ->check(CLI::Range(std::int64_t{1}, std::int64_t{1} << 30));
  cmd->add_option("--noise", p.noise, "Gaussian label noise sigma")
      ->capture_default_str();
  cmd->add_option("--loss", p.loss, "Loss kind")
      ->check(CLI::IsMember({"squared", "logistic"}))
      ->capture_default_str();
  cmd->add_option("--lambda", p.lambda, "Regularization weight")
      ->capture_default_str();
  cmd->add_option("--regularizer", p.regularizer, "Coupling penalty")
      ->check(CLI::IsMember({"nuclear", "l21"}))
      ->capture_default_str();
  cmd->add_option("--l2-augment", p.l2_augment,
                  "Optional l2 term for strict convexity")
      ->capture_default_str();
}

void add_run_flags(CLI::App* cmd, RunFlags& r, bool with_mode) {
  if (with_mode) {
    cmd->add_option("--mode", r.mode, "Engine to run")
        ->check(CLI::IsMember({"amtl", "smtl"}))
        ->capture_default_str();
  }
  cmd->add_option("--clock", r.clock, "Execution clock")
      ->check(CLI::IsMember({"virtual", "real"}))
      ->capture_default_str();
  cmd->add_option("--iters", r.iterations, "Accepted updates per task")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30))
      ->capture_default_str();
  cmd->add_option("--offset", r.offset, "Delay offset in seconds")
      ->capture_default_str();
  cmd->add_option("--jitter", r.jitter, "Uniform delay jitter width in seconds")
      ->capture_default_str();
  cmd->add_option("--seed", r.seed, "Seed for data and delay streams")
      ->capture_default_str();
  cmd->add_option("--eta", r.eta, "Prox/gradient step (default eta-scale/L)");
  cmd->add_option("--eta-scale", r.eta_scale, "eta as a multiple of 1/L")
      ->capture_default_str();
  cmd->add_option("--eta-min", r.eta_min, "Lower end of the relaxation interval")
      ->capture_default_str();
  cmd->add_option("--c", r.c, "Relaxation constant c in (0,1)")
      ->capture_default_str();
  cmd->add_option("--tau-max", r.tau_max,
                  "Staleness bound for the step cap (default 2T)");
  cmd->add_flag("--dynamic-step", r.dynamic,
                "Scale the relaxation step by the delay-history multiplier");
  cmd->add_option("--window", r.window, "Delay history window")
      ->capture_default_str();
  cmd->add_option("--objective-every", r.objective_every,
                  "Sample the objective every N updates (default T)");
  cmd->add_option("--kappa-grad", r.kappa_grad,
                  "Virtual-clock gradient cost per sample-dimension, seconds")
      ->capture_default_str();
  cmd->add_option("--kappa-svd", r.kappa_svd,
                  "Virtual-clock backward-step cost coefficient, seconds")
      ->capture_default_str();
  cmd->add_option("--slow-task", r.slow_task,
                  "Give one task a different delay offset");
  cmd->add_option("--slow-offset", r.slow_offset,
                  "Offset for the slow task (default 10x offset)");
}

LossKind loss_kind_of(const std::string& s) {
  return s == "squared" ? LossKind::Squared : LossKind::Logistic;
}

Regularizer regularizer_of(const std::string& s) {
  return s == "nuclear" ? Regularizer::NuclearNorm : Regularizer::L21;
}

SyntheticSpec spec_of(const ProblemFlags& p, std::uint64_t seed) {
  SyntheticSpec spec;
  spec.t_count = p.tasks;
  spec.n_per_task = p.samples;
  spec.dim = p.dim;
  const std::size_t cap = std::min(p.dim, p.tasks);
  spec.true_rank = p.rank > 0 ? static_cast<std::size_t>(p.rank)
                              : (cap + 4) / 5;  // ceil(min(d,T)/5)
  spec.noise_sigma = p.noise;
  spec.seed = seed;
  spec.loss_kind = loss_kind_of(p.loss);
  return spec;
}

MtlProblem build_problem(const ProblemFlags& p, std::uint64_t seed) {
  if (!p.data_dir.empty()) return load_csv_dir(p.data_dir);
  return gen_synthetic(spec_of(p, seed), p.lambda, regularizer_of(p.regularizer),
                       p.l2_augment)
      .problem;
}

RunConfig build_config(const MtlProblem& problem, const RunFlags& r, Mode mode) {
  RunConfig cfg;
  cfg.mode = mode;
  cfg.clock = r.clock == "virtual" ? ClockKind::Virtual : ClockKind::Real;
  cfg.iterations_per_task = r.iterations;
  cfg.seed = r.seed;
  cfg.delay_model.offset = r.offset;
  cfg.delay_model.jitter_scale = r.jitter;
  cfg.delay_model.seed = r.seed;
  if (r.slow_task >= 0) {
    const auto t = static_cast<std::size_t>(r.slow_task);
    if (t >= problem.task_count()) {
      throw ArgumentError("--slow-task " + std::to_string(t) + " out of range for T=" +
                          std::to_string(problem.task_count()));
    }
    cfg.delay_model.per_task_offset.assign(problem.task_count(), r.offset);
    cfg.delay_model.per_task_offset[t] =
        r.slow_offset >= 0.0 ? r.slow_offset : 10.0 * r.offset;
  }
  cfg.step_policy.eta =
      r.eta > 0.0 ? r.eta : r.eta_scale / problem.smooth_lipschitz();
  cfg.step_policy.eta_min = r.eta_min;
  cfg.step_policy.c = r.c;
  cfg.step_policy.tau_max = r.tau_max >= 0
                                ? static_cast<std::size_t>(r.tau_max)
                                : 2 * problem.task_count();
  cfg.step_policy.dynamic = r.dynamic;
  cfg.step_policy.window = r.window;
  cfg.objective_every = r.objective_every;
  cfg.kappa_grad = r.kappa_grad;
  cfg.kappa_svd = r.kappa_svd;
  return cfg;
}

void print_summary(const RunResult& result) {
  const SummaryRow row = summary_of(result);
  std::cout << "mode=" << row.mode << " T=" << row.t_count << " d=" << row.dim
            << " n=" << row.n << " offset=" << format_double(row.offset)
            << " makespan=" << format_ns_as_seconds(row.makespan_ns)
            << " final_objective=" << format_double(row.final_objective)
            << " measured_tau=" << row.measured_tau << " seed=" << row.seed
            << "\n";
}

int cmd_gen(const ProblemFlags& p, std::uint64_t seed, const std::string& out) {
  const MtlProblem problem =
      gen_synthetic(spec_of(p, seed), p.lambda, regularizer_of(p.regularizer),
                    p.l2_augment)
          .problem;
  save_csv_dir(problem, out);
  std::cout << "wrote " << problem.task_count() << " task files to " << out << "\n";
  return kExitOk;
}

int cmd_run(const ProblemFlags& p, const RunFlags& r, const std::string& out) {
  const MtlProblem problem = build_problem(p, r.seed);
  const RunConfig cfg = build_config(problem, r, r.mode == "amtl" ? Mode::Amtl
                                                                  : Mode::Smtl);
  const RunResult result = run(problem, cfg);
  print_summary(result);
  if (!out.empty()) export_csv(result, out);
  return kExitOk;
}

int cmd_compare(const ProblemFlags& p, const RunFlags& r, const std::string& out) {
  const MtlProblem problem = build_problem(p, r.seed);
  RunFlags traced = r;
  traced.objective_every = 1;  // full-resolution curves
  const RunResult a = run(problem, build_config(problem, traced, Mode::Amtl));
  const RunResult b = run(problem, build_config(problem, traced, Mode::Smtl));
  const ComparisonSummary cmp = compare_report(a, b);
  print_summary(a);
  print_summary(b);
  std::cout << "makespan_ratio=" << format_double(cmp.makespan_ratio)
            << " final_objective_diff=" << format_double(cmp.final_objective_diff)
            << "\n";
  if (!out.empty()) {
    const std::filesystem::path dir(out);
    export_csv(a, dir / "amtl");
    export_csv(b, dir / "smtl");
    std::ofstream curves(dir / "curves.csv", std::ios::binary);
    if (!curves) throw IoError("cannot write " + (dir / "curves.csv").string());
    curves << curves_csv(cmp, "amtl", "smtl");
  }
  return kExitOk;
}

int cmd_bench(const ProblemFlags& p, const RunFlags& r, const std::string& axis,
              const std::vector<std::size_t>& values, const std::string& out) {
  if (values.empty()) throw ArgumentError("bench: empty sweep range");
  std::string csv =
      "mode,T,d,n,offset,makespan,final_objective,measured_tau,seed\n";
  std::size_t index = 0;
  for (const std::size_t value : values) {
    ProblemFlags point = p;
    if (axis == "tasks") {
      point.tasks = value;
    } else if (axis == "samples") {
      point.samples = value;
    } else {
      point.dim = value;
    }
    RunFlags flags = r;
    flags.seed = r.seed + index;  // deterministic per sweep point
    const MtlProblem problem = build_problem(point, flags.seed);
    for (const Mode mode : {Mode::Amtl, Mode::Smtl}) {
      const RunResult result = run(problem, build_config(problem, flags, mode));
      std::string row = summary_csv(result);
      csv += row.substr(row.find('\n') + 1);
    }
    ++index;
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::ofstream file(out, std::ios::binary);
    if (!file) throw IoError("cannot write " + out);
    file << csv;
    std::cout << "wrote " << 2 * values.size() << " summary rows to " << out << "\n";
  }
  return kExitOk;
}

int cmd_selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "ok: " : "FAILED: ") << name << "\n";
    if (!ok) ++failures;
  };

  {
    Rng rng(1);
    DenseMatrix x(8, 3);
    for (double& v : x.data()) v = rng.normal();
    Vector y(8);
    for (double& v : y) v = rng.normal();
    const TaskDataset task = make_task(std::move(x), std::move(y), LossKind::Squared, 0);
    Vector w{0.3, -0.2, 0.1};
    const Vector g = loss_gradient(task, w);
    Vector fd(3);
    for (std::size_t i = 0; i < 3; ++i) {
      Vector probe = w;
      probe[i] = w[i] + 1e-6;
      const double up = loss_value(task, probe);
      probe[i] = w[i] - 1e-6;
      fd[i] = (up - loss_value(task, probe)) / 2e-6;
    }
    double err = 0.0;
    for (std::size_t i = 0; i < 3; ++i) err += (g[i] - fd[i]) * (g[i] - fd[i]);
    check(std::sqrt(err) <= 1e-6 * std::max(1.0, norm2(g)),
          "gradient matches central differences");
  }
  {
    const ProxResult r = prox_nuclear(DenseMatrix::from_rows({{3, 0}, {0, 1}}), 2.0);
    check(std::abs(r.w_matrix(0, 0) - 1.0) <= 1e-12 &&
              std::abs(r.w_matrix(1, 1)) <= 1e-12,
          "nuclear prox shrinks a diagonal spectrum");
    const DenseMatrix l = prox_l21(DenseMatrix::from_rows({{3, 4}}), 2.5);
    check(std::abs(l(0, 0) - 1.5) <= 1e-12 && std::abs(l(0, 1) - 2.0) <= 1e-12,
          "l21 prox scales rows");
  }
  {
    const SyntheticSpec spec{3, 10, 5, 1, 0.1, 99, LossKind::Squared};
    const MtlProblem problem = gen_synthetic(spec).problem;
    RunConfig cfg;
    cfg.mode = Mode::Amtl;
    cfg.iterations_per_task = 5;
    cfg.step_policy.tau_max = 8;
    cfg.delay_model.offset = 5.0;
    cfg.delay_model.jitter_scale = 1.0;
    const RunResult a = run_amtl(problem, cfg);
    const RunResult b = run_amtl(problem, cfg);
    check(events_csv(a) == events_csv(b), "virtual clock runs are deterministic");
    cfg.mode = Mode::Smtl;
    const RunResult s = run_smtl(problem, cfg);
    check(a.makespan_ns < s.makespan_ns, "amtl makespan beats smtl under delays");
    check(parse_summary_csv(summary_csv(a)) == summary_of(a),
          "summary csv round-trips");
  }
  std::cout << (failures == 0 ? "selftest passed\n" : "selftest failed\n");
  return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "amtl: asynchronous multi-task learning solver and experiment harness.\n"
      "Exit codes: 0 success, 2 usage/configuration/data error, 3 numerical\n"
      "failure (divergence or staleness bound violation)."};
  app.require_subcommand(1);

  ProblemFlags gen_p;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic task directory");
  add_problem_flags(gen, gen_p, false);
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();

  ProblemFlags run_p;
  RunFlags run_r;
  std::string run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "Run one engine and print a summary");
  add_problem_flags(run_cmd, run_p, true);
  add_run_flags(run_cmd, run_r, true);
  run_cmd->add_option("--out", run_out, "Directory for events.csv and summary.csv");

  ProblemFlags cmp_p;
  RunFlags cmp_r;
  std::string cmp_out;
  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "Run AMTL and SMTL back to back and report");
  add_problem_flags(cmp_cmd, cmp_p, true);
  add_run_flags(cmp_cmd, cmp_r, false);
  cmp_cmd->add_option("--out", cmp_out, "Directory for traces and curves.csv");

  ProblemFlags bench_p;
  RunFlags bench_r;
  std::string bench_axis = "tasks";
  std::vector<std::size_t> bench_values;
  std::string bench_out;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "Sweep a problem axis with matched engine pairs");
  add_problem_flags(bench_cmd, bench_p, false);
  add_run_flags(bench_cmd, bench_r, false);
  bench_cmd->add_option("--axis", bench_axis, "Sweep axis")
      ->check(CLI::IsMember({"tasks", "samples", "dim"}))
      ->capture_default_str();
  bench_cmd->add_option("--values", bench_values, "Sweep values")
      ->required()
      ->delimiter(',');
  bench_cmd->add_option("--out", bench_out, "Sweep CSV file (default stdout)");

  app.add_subcommand("selftest", "Quick built-in checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("gen")) return cmd_gen(gen_p, gen_seed, gen_out);
    if (app.got_subcommand("run")) return cmd_run(run_p, run_r, run_out);
    if (app.got_subcommand("compare")) return cmd_compare(cmp_p, cmp_r, cmp_out);
    if (app.got_subcommand("bench")) {
      return cmd_bench(bench_p, bench_r, bench_axis, bench_values, bench_out);
    }
    return cmd_selftest();
  } catch (const amtl::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const amtl::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kExitFailure;
  }
}
