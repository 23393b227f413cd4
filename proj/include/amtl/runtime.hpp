#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "amtl/matrix.hpp"
#include "amtl/model.hpp"
#include "amtl/rng.hpp"
#include "amtl/scheduler.hpp"

namespace amtl {

enum class Mode { Amtl, Smtl };
enum class ClockKind { Virtual, Real };

// Communication delay per activation: offset + uniform[0, jitter_scale)
// seconds. per_task_offset, when non-empty, overrides the offset for the
// matching task index (heterogeneous networks, e.g. one slow node).
struct DelayModel {
  double offset = 0.0;
  double jitter_scale = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> per_task_offset;

  double offset_for(std::size_t task_id) const {
    return task_id < per_task_offset.size() ? per_task_offset[task_id] : offset;
  }
};

// One delay draw in seconds; advances rng deterministically.
double sample_delay(const DelayModel& model, Rng& rng, std::size_t task_id = 0);
std::int64_t sample_delay_ns(const DelayModel& model, Rng& rng, std::size_t task_id);

struct RunConfig {
  Mode mode = Mode::Amtl;
  ClockKind clock = ClockKind::Virtual;
  std::size_t iterations_per_task = 10;
  DelayModel delay_model;
  StepPolicy step_policy;
  std::uint64_t seed = 0;

  // Virtual-clock compute-cost model: gradient costs kappa_grad * n_t * d
  // seconds, the backward step costs kappa_svd * d * T * min(d, T).
  double kappa_grad = 1e-8;
  double kappa_svd = 1e-8;
  // Sample the objective every this many accepted updates; 0 means "every T".
  std::size_t objective_every = 0;
};

// One accepted coordinate update. Times are nanoseconds on the run's clock
// (virtual or wall); staleness counts updates by other tasks applied between
// the snapshot read and this write.
struct UpdateEvent {
  std::size_t task_id = 0;
  std::size_t k = 0;  // global update index, in application order
  std::int64_t request_time_ns = 0;
  std::int64_t write_time_ns = 0;
  std::size_t staleness = 0;
  std::optional<double> objective_after;
};

struct RunResult {
  DenseMatrix final_v;
  DenseMatrix final_w;
  std::vector<UpdateEvent> events;
  std::int64_t makespan_ns = 0;
  std::vector<std::size_t> per_task_update_counts;
  double final_objective = 0.0;
  std::size_t measured_tau = 0;
  RunConfig config_echo;

  // Problem shape echo for summaries.
  std::size_t t_count = 0;
  std::size_t dim = 0;
  std::size_t n_first = 0;

  double makespan_seconds() const {
    return static_cast<double>(makespan_ns) / 1e9;
  }
};

// Maximum staleness over a completed event log.
std::size_t measure_staleness(std::span<const UpdateEvent> events);

// Central store for the real concurrent engine: the authoritative V plus one
// version counter per task column. Writes lock only the touched column, so a
// full-matrix read may mix column versions; that inconsistency is part of the
// asynchronous model.
class SharedModel {
 public:
  SharedModel(std::size_t dim, std::size_t t_count);

  std::size_t dim() const { return dim_; }
  std::size_t task_count() const { return versions_.size(); }

  Vector read_column(std::size_t t) const;
  DenseMatrix read_snapshot() const;  // column-by-column, no global lock
  void write_column(std::size_t t, std::span<const double> value);
  std::uint64_t column_version(std::size_t t) const;

 private:
  std::size_t dim_;
  DenseMatrix v_;
  std::vector<std::uint64_t> versions_;
  mutable std::vector<std::mutex> column_locks_;
};

// Asynchronous engine: per task activation the server computes the full
// backward step, the task applies the forward step on its block, and the
// server commits the relaxed update to that column.
RunResult run_amtl(const MtlProblem& problem, const RunConfig& config);

// Synchronous baseline: barrier rounds; every round waits for the slowest
// task before any column is committed.
RunResult run_smtl(const MtlProblem& problem, const RunConfig& config);

// Dispatch on config.mode.
RunResult run(const MtlProblem& problem, const RunConfig& config);

}  // namespace amtl
