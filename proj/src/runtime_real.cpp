#include <atomic>
#include <chrono>
#include <exception>
#include <future>
#include <mutex>
#include <thread>
#include <vector>

#include "amtl/errors.hpp"
#include "amtl/operators.hpp"
#include "runtime_detail.hpp"

namespace amtl::detail {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ns(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start)
      .count();
}

}  // namespace

RunResult run_amtl_real(const MtlProblem& problem, const RunConfig& config) {
  const EngineSetup setup = prepare_engine(problem, config, Mode::Amtl);
  const std::size_t t_count = setup.t_count;

  SharedModel shared(setup.dim, t_count);
  std::atomic<std::size_t> accepted{0};
  std::atomic<bool> aborted{false};
  std::exception_ptr first_error;
  std::mutex server_mu;  // serializes commits, the event log, and error capture
  std::vector<UpdateEvent> events;
  events.reserve(t_count * config.iterations_per_task);
  std::vector<std::size_t> completed(t_count, 0);
  const Clock::time_point start = Clock::now();

  auto worker = [&](std::size_t t) {
    Rng rng(mix_seed(config.delay_model.seed, t));
    DelayHistory hist(t, setup.policy.window);
    try {
      for (std::size_t iter = 0; iter < config.iterations_per_task; ++iter) {
        if (aborted.load(std::memory_order_acquire)) return;
        const std::int64_t request_ns = elapsed_ns(start);
        const std::size_t k_read = accepted.load(std::memory_order_acquire);
        const DenseMatrix snapshot = shared.read_snapshot();
        BlockCandidate cand = backward_forward_block(problem, snapshot, t, setup.eta);
        const std::int64_t delay_ns = sample_delay_ns(config.delay_model, rng, t);
        std::this_thread::sleep_for(std::chrono::nanoseconds(delay_ns));

        std::lock_guard<std::mutex> lock(server_mu);
        if (aborted.load(std::memory_order_relaxed)) return;
        const std::size_t k_now = accepted.load(std::memory_order_relaxed);
        const std::size_t staleness = k_now - k_read;
        if (!all_finite(cand.v_new)) {
          throw NumericalError("amtl: non-finite iterate for task " +
                               std::to_string(t) + " at update k=" +
                               std::to_string(k_now));
        }
        if (staleness > setup.policy.tau_max) {
          throw StalenessError("amtl: task " + std::to_string(t) + " staleness " +
                               std::to_string(staleness) + " exceeds tau_max=" +
                               std::to_string(setup.policy.tau_max) +
                               " at update k=" + std::to_string(k_now));
        }
        record_delay(hist, ns_to_seconds(delay_ns), ns_to_seconds(request_ns));
        const double multiplier =
            setup.policy.dynamic ? dynamic_multiplier(hist) : 1.0;
        const Vector updated = km_update(shared.read_column(t), cand, setup.eta_k,
                                         multiplier);
        shared.write_column(t, updated);

        UpdateEvent rec;
        rec.task_id = t;
        rec.k = k_now;
        rec.request_time_ns = request_ns;
        rec.write_time_ns = elapsed_ns(start);
        rec.staleness = staleness;
        accepted.store(k_now + 1, std::memory_order_release);
        if ((k_now + 1) % setup.objective_every == 0) {
          rec.objective_after = objective(
              problem, apply_prox(problem, shared.read_snapshot(), setup.eta));
        }
        events.push_back(std::move(rec));
        ++completed[t];
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(server_mu);
      if (!first_error) first_error = std::current_exception();
      aborted.store(true, std::memory_order_release);
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(t_count);
  for (std::size_t t = 0; t < t_count; ++t) threads.emplace_back(worker, t);
  for (std::thread& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);

  std::sort(events.begin(), events.end(),
            [](const UpdateEvent& a, const UpdateEvent& b) { return a.k < b.k; });
  return finalize_run(problem, config, setup, shared.read_snapshot(),
                      std::move(events), std::move(completed));
}

RunResult run_smtl_real(const MtlProblem& problem, const RunConfig& config) {
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
  const Clock::time_point start = Clock::now();

  std::size_t accepted = 0;
  for (std::size_t round = 0; round < config.iterations_per_task; ++round) {
    const std::int64_t round_start = elapsed_ns(start);
    const DenseMatrix p = apply_prox(problem, v, setup.eta);

    struct TaskOut {
      Vector candidate;
      double delay_seconds;
    };
    std::vector<std::future<TaskOut>> futures;
    futures.reserve(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
      futures.push_back(std::async(std::launch::async, [&, t]() {
        Vector col = p.col(t);
        const Vector grad = smooth_column_gradient(problem, t, col);
        for (std::size_t i = 0; i < col.size(); ++i) col[i] -= setup.eta * grad[i];
        const std::int64_t delay_ns =
            sample_delay_ns(config.delay_model, delay_rng[t], t);
        std::this_thread::sleep_for(std::chrono::nanoseconds(delay_ns));
        return TaskOut{std::move(col), ns_to_seconds(delay_ns)};
      }));
    }
    std::vector<TaskOut> outs;
    outs.reserve(t_count);
    for (auto& f : futures) outs.push_back(f.get());  // the barrier

    const std::int64_t barrier_ns = elapsed_ns(start);
    for (std::size_t t = 0; t < t_count; ++t) {
      if (!all_finite(outs[t].candidate)) {
        throw NumericalError("smtl: non-finite iterate for task " + std::to_string(t) +
                             " at update k=" + std::to_string(accepted));
      }
      record_delay(history[t], outs[t].delay_seconds, ns_to_seconds(barrier_ns));
      const double multiplier =
          setup.policy.dynamic ? dynamic_multiplier(history[t]) : 1.0;
      const Vector updated =
          km_update(v.col(t), BlockCandidate{t, std::move(outs[t].candidate)},
                    setup.eta_k, multiplier);
      v.set_col(t, updated);

      UpdateEvent rec;
      rec.task_id = t;
      rec.k = accepted;
      rec.request_time_ns = round_start;
      rec.write_time_ns = barrier_ns;
      rec.staleness = 0;
      ++accepted;
      if (accepted % setup.objective_every == 0) {
        rec.objective_after = objective(problem, apply_prox(problem, v, setup.eta));
      }
      events.push_back(std::move(rec));
      ++completed[t];
    }
  }
  return finalize_run(problem, config, setup, std::move(v), std::move(events),
                      std::move(completed));
}

}  // namespace amtl::detail
