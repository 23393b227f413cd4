#include <algorithm>
#include <queue>
#include <vector>

#include "amtl/errors.hpp"
#include "amtl/operators.hpp"
#include "runtime_detail.hpp"

namespace amtl::detail {

namespace {

enum class EventKind { Request, Write };

struct Event {
  std::int64_t time_ns = 0;
  std::size_t task_id = 0;
  std::uint64_t seq = 0;  // insertion order; makes same-task ties causal
  EventKind kind = EventKind::Request;
  Vector candidate;
  std::int64_t request_time_ns = 0;
  double delay_seconds = 0.0;
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time_ns != b.time_ns) return a.time_ns > b.time_ns;
    if (a.task_id != b.task_id) return a.task_id > b.task_id;
    return a.seq > b.seq;
  }
};

}  // namespace

RunResult run_amtl_virtual(const MtlProblem& problem, const RunConfig& config) {
  const EngineSetup setup = prepare_engine(problem, config, Mode::Amtl);
  const std::size_t t_count = setup.t_count;

  DenseMatrix v(setup.dim, t_count);
  std::vector<Rng> delay_rng;
  std::vector<DelayHistory> history;
  for (std::size_t t = 0; t < t_count; ++t) {
    delay_rng.emplace_back(mix_seed(config.delay_model.seed, t));
    history.emplace_back(t, setup.policy.window);
  }
  std::vector<std::size_t> snapshot_k(t_count, 0);
  std::vector<std::size_t> completed(t_count, 0);
  std::vector<UpdateEvent> events;
  events.reserve(t_count * config.iterations_per_task);

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue;
  std::uint64_t seq = 0;
  for (std::size_t t = 0; t < t_count; ++t) {
    Event e;
    e.time_ns = 0;
    e.task_id = t;
    e.seq = seq++;
    e.kind = EventKind::Request;
    queue.push(std::move(e));
  }

  std::size_t accepted = 0;
  while (!queue.empty()) {
    Event e = queue.top();
    queue.pop();
    const std::size_t t = e.task_id;
    if (e.kind == EventKind::Request) {
      snapshot_k[t] = accepted;
      BlockCandidate cand = backward_forward_block(problem, v, t, setup.eta);
      Event w;
      w.task_id = t;
      w.seq = seq++;
      w.kind = EventKind::Write;
      w.request_time_ns = e.time_ns;
      const std::int64_t delay_ns = sample_delay_ns(config.delay_model, delay_rng[t], t);
      w.delay_seconds = ns_to_seconds(delay_ns);
      w.time_ns = e.time_ns + setup.prox_cost_ns + setup.grad_cost_ns[t] + delay_ns;
      w.candidate = std::move(cand.v_new);
      queue.push(std::move(w));
    } else {
      if (!all_finite(e.candidate)) {
        throw NumericalError("amtl: non-finite iterate for task " + std::to_string(t) +
                             " at update k=" + std::to_string(accepted));
      }
      const std::size_t staleness = accepted - snapshot_k[t];
      if (staleness > setup.policy.tau_max) {
        throw StalenessError(
            "amtl: task " + std::to_string(t) + " staleness " +
            std::to_string(staleness) + " exceeds tau_max=" +
            std::to_string(setup.policy.tau_max) + " at update k=" +
            std::to_string(accepted));
      }
      record_delay(history[t], e.delay_seconds, ns_to_seconds(e.time_ns));
      const double multiplier =
          setup.policy.dynamic ? dynamic_multiplier(history[t]) : 1.0;
      const Vector updated =
          km_update(v.col(t), BlockCandidate{t, std::move(e.candidate)},
                    setup.eta_k, multiplier);
      v.set_col(t, updated);

      UpdateEvent rec;
      rec.task_id = t;
      rec.k = accepted;
      rec.request_time_ns = e.request_time_ns;
      rec.write_time_ns = e.time_ns;
      rec.staleness = staleness;
      ++accepted;
      if (accepted % setup.objective_every == 0) {
        rec.objective_after =
            objective(problem, apply_prox(problem, v, setup.eta));
      }
      events.push_back(std::move(rec));

      if (++completed[t] < config.iterations_per_task) {
        Event r;
        r.time_ns = e.time_ns;
        r.task_id = t;
        r.seq = seq++;
        r.kind = EventKind::Request;
        queue.push(std::move(r));
      }
    }
  }
  return finalize_run(problem, config, setup, std::move(v), std::move(events),
                      std::move(completed));
}

RunResult run_smtl_virtual(const MtlProblem& problem, const RunConfig& config) {
  const EngineSetup setup = prepare_engine(problem, config, Mode::Smtl);
  const std::size_t t_count = setup.t_count;

  DenseMatrix v(setup.dim, t_count);
  std::vector<Rng> delay_rng;
  std::vector<DelayHistory> history;
  for (std::size_t t = 0; t < t_count; ++t) {
    delay_rng.emplace_back(mix_seed(config.delay_model.seed, t));
    history.emplace_back(t, setup.policy.window);
  }
  std::vector<std::size_t> completed(t_count, 0);
  std::vector<UpdateEvent> events;
  events.reserve(t_count * config.iterations_per_task);

  std::size_t accepted = 0;
  std::int64_t round_start_ns = 0;
  for (std::size_t round = 0; round < config.iterations_per_task; ++round) {
    // One backward step per round; every task forwards on the same output.
    const DenseMatrix p = apply_prox(problem, v, setup.eta);

    std::vector<Vector> candidates(t_count);
    std::vector<double> delays(t_count);
    std::int64_t barrier_ns = round_start_ns;
    for (std::size_t t = 0; t < t_count; ++t) {
      Vector col = p.col(t);
      const Vector grad = smooth_column_gradient(problem, t, col);
      for (std::size_t i = 0; i < col.size(); ++i) col[i] -= setup.eta * grad[i];
      candidates[t] = std::move(col);
      const std::int64_t delay_ns = sample_delay_ns(config.delay_model, delay_rng[t], t);
      delays[t] = ns_to_seconds(delay_ns);
      barrier_ns = std::max(barrier_ns, round_start_ns + setup.prox_cost_ns +
                                            setup.grad_cost_ns[t] + delay_ns);
    }

    for (std::size_t t = 0; t < t_count; ++t) {
      if (!all_finite(candidates[t])) {
        throw NumericalError("smtl: non-finite iterate for task " + std::to_string(t) +
                             " at update k=" + std::to_string(accepted));
      }
      record_delay(history[t], delays[t], ns_to_seconds(barrier_ns));
      const double multiplier =
          setup.policy.dynamic ? dynamic_multiplier(history[t]) : 1.0;
      const Vector updated = km_update(
          v.col(t), BlockCandidate{t, std::move(candidates[t])}, setup.eta_k,
          multiplier);
      v.set_col(t, updated);

      UpdateEvent rec;
      rec.task_id = t;
      rec.k = accepted;
      rec.request_time_ns = round_start_ns;
      rec.write_time_ns = barrier_ns;
      rec.staleness = 0;  // every candidate was built from the full post-round state
      ++accepted;
      if (accepted % setup.objective_every == 0) {
        rec.objective_after =
            objective(problem, apply_prox(problem, v, setup.eta));
      }
      events.push_back(std::move(rec));
      ++completed[t];
    }
    round_start_ns = barrier_ns;
  }
  return finalize_run(problem, config, setup, std::move(v), std::move(events),
                      std::move(completed));
}

}  // namespace amtl::detail
