#pragma once

#include <cstddef>
#include <deque>

namespace amtl {

// Step-size configuration. eta is the prox/gradient step shared by the
// backward and forward halves; the remaining fields bound the relaxation
// step eta_k = c / (2 tau_max / sqrt(T) + 1), clamped below by eta_min.
struct StepPolicy {
  double eta = 0.0;
  double eta_min = 1e-4;
  double c = 0.9;
  std::size_t tau_max = 0;
  bool dynamic = false;
  std::size_t window = 5;
};

// Relaxation step for T tasks. Constant across iterations: any value in the
// admissible interval works and the upper cap maximizes progress. Throws
// ConfigError when eta_min exceeds the cap (the interval is empty).
double km_step_size(const StepPolicy& policy, std::size_t t_count);

// Sliding window of one task's recent communication delays, in seconds.
class DelayHistory {
 public:
  DelayHistory() = default;
  DelayHistory(std::size_t task_id, std::size_t window)
      : task_id_(task_id), window_(window == 0 ? 1 : window) {}

  std::size_t task_id() const { return task_id_; }
  std::size_t window() const { return window_; }
  std::size_t samples_seen() const { return seen_; }
  std::size_t size() const { return ring_.size(); }
  double current_time() const { return z_; }

  // Mean of the stored samples; 0 when empty.
  double mean_delay() const;

  friend void record_delay(DelayHistory& history, double nu, double now);

 private:
  std::size_t task_id_ = 0;
  std::size_t window_ = 5;
  std::deque<double> ring_;
  std::size_t seen_ = 0;
  double z_ = 0.0;
};

// Push one delay sample, evicting the oldest beyond the window. nu must be
// non-negative; now advances the history's time point.
void record_delay(DelayHistory& history, double nu, double now = 0.0);

// Delay-driven step multiplier: log10(max(mean delay, 10)). Equals 1 whenever
// the recent mean delay is at most 10 seconds, so a fast network degenerates
// to the static scheme.
double dynamic_multiplier(const DelayHistory& history);

}  // namespace amtl
