#include "amtl/runtime.hpp"

#include <algorithm>
#include <cmath>

#include "amtl/errors.hpp"
#include "amtl/operators.hpp"
#include "runtime_detail.hpp"

namespace amtl {

double sample_delay(const DelayModel& model, Rng& rng, std::size_t task_id) {
  return static_cast<double>(sample_delay_ns(model, rng, task_id)) / 1e9;
}

std::int64_t sample_delay_ns(const DelayModel& model, Rng& rng, std::size_t task_id) {
  const double offset = model.offset_for(task_id);
  const std::int64_t offset_ns = detail::seconds_to_ns(offset);
  const std::int64_t jitter_ns = detail::seconds_to_ns(model.jitter_scale);
  if (jitter_ns <= 0) return offset_ns;
  return offset_ns +
         static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(jitter_ns)));
}

std::size_t measure_staleness(std::span<const UpdateEvent> events) {
  std::size_t tau = 0;
  for (const UpdateEvent& e : events) tau = std::max(tau, e.staleness);
  return tau;
}

SharedModel::SharedModel(std::size_t dim, std::size_t t_count)
    : dim_(dim), v_(dim, t_count), versions_(t_count, 0),
      column_locks_(t_count) {}

Vector SharedModel::read_column(std::size_t t) const {
  std::lock_guard<std::mutex> lock(column_locks_[t]);
  return v_.col(t);
}

DenseMatrix SharedModel::read_snapshot() const {
  DenseMatrix snap(dim_, task_count());
  for (std::size_t t = 0; t < task_count(); ++t) {
    std::lock_guard<std::mutex> lock(column_locks_[t]);
    for (std::size_t i = 0; i < dim_; ++i) snap(i, t) = v_(i, t);
  }
  return snap;
}

void SharedModel::write_column(std::size_t t, std::span<const double> value) {
  std::lock_guard<std::mutex> lock(column_locks_[t]);
  v_.set_col(t, value);
  ++versions_[t];
}

std::uint64_t SharedModel::column_version(std::size_t t) const {
  std::lock_guard<std::mutex> lock(column_locks_[t]);
  return versions_[t];
}

namespace detail {

EngineSetup prepare_engine(const MtlProblem& problem, const RunConfig& config,
                           Mode expected_mode) {
  if (config.mode != expected_mode) {
    throw ConfigError("engine invoked with mismatched mode");
  }
  if (config.iterations_per_task == 0) {
    throw ArgumentError("iterations_per_task must be at least 1");
  }
  EngineSetup s;
  s.t_count = problem.task_count();
  s.dim = problem.dim;
  // Default eta = 1/L when unset.
  s.eta = config.step_policy.eta > 0.0 ? config.step_policy.eta
                                       : 1.0 / problem.smooth_lipschitz();
  require_admissible_eta(problem, s.eta);
  StepPolicy policy = config.step_policy;
  policy.eta = s.eta;
  s.eta_k = km_step_size(policy, s.t_count);
  s.policy = policy;
  s.prox_cost_ns = seconds_to_ns(config.kappa_svd * static_cast<double>(s.dim) *
                                 static_cast<double>(s.t_count) *
                                 static_cast<double>(std::min(s.dim, s.t_count)));
  s.grad_cost_ns.resize(s.t_count);
  for (std::size_t t = 0; t < s.t_count; ++t) {
    s.grad_cost_ns[t] =
        seconds_to_ns(config.kappa_grad *
                      static_cast<double>(problem.tasks[t].sample_count()) *
                      static_cast<double>(s.dim));
  }
  s.objective_every = config.objective_every == 0 ? s.t_count : config.objective_every;
  return s;
}

RunResult finalize_run(const MtlProblem& problem, const RunConfig& config,
                       const EngineSetup& setup, DenseMatrix v,
                       std::vector<UpdateEvent> events,
                       std::vector<std::size_t> counts) {
  RunResult r;
  r.final_w = recover_w(problem, v, setup.eta);
  r.final_v = std::move(v);
  r.makespan_ns = 0;
  for (const UpdateEvent& e : events) r.makespan_ns = std::max(r.makespan_ns, e.write_time_ns);
  r.measured_tau = measure_staleness(events);
  r.events = std::move(events);
  r.per_task_update_counts = std::move(counts);
  r.final_objective = objective(problem, r.final_w);
  r.config_echo = config;
  r.config_echo.step_policy = setup.policy;
  r.t_count = problem.task_count();
  r.dim = problem.dim;
  r.n_first = problem.tasks.front().sample_count();
  return r;
}

}  // namespace detail

RunResult run(const MtlProblem& problem, const RunConfig& config) {
  return config.mode == Mode::Amtl ? run_amtl(problem, config)
                                   : run_smtl(problem, config);
}

RunResult run_amtl(const MtlProblem& problem, const RunConfig& config) {
  return config.clock == ClockKind::Virtual
             ? detail::run_amtl_virtual(problem, config)
             : detail::run_amtl_real(problem, config);
}

RunResult run_smtl(const MtlProblem& problem, const RunConfig& config) {
  return config.clock == ClockKind::Virtual
             ? detail::run_smtl_virtual(problem, config)
             : detail::run_smtl_real(problem, config);
}

}  // namespace amtl
