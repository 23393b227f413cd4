#include "amtl/scheduler.hpp"

#include <cmath>

#include "amtl/errors.hpp"
#include "amtl/format.hpp"

namespace amtl {

double km_step_size(const StepPolicy& policy, std::size_t t_count) {
  if (t_count == 0) throw ArgumentError("km_step_size: zero tasks");
  if (!(policy.c > 0.0) || !(policy.c < 1.0)) {
    throw ConfigError("km_step_size: c=" + format_double(policy.c) +
                      " outside (0,1)");
  }
  if (!(policy.eta_min > 0.0)) {
    throw ConfigError("km_step_size: eta_min must be positive");
  }
  const double cap = policy.c / (2.0 * static_cast<double>(policy.tau_max) /
                                     std::sqrt(static_cast<double>(t_count)) +
                                 1.0);
  if (policy.eta_min > cap) {
    throw ConfigError("km_step_size: eta_min=" + format_double(policy.eta_min) +
                      " exceeds the admissible cap c/(2*tau/sqrt(T)+1)=" +
                      format_double(cap) + "; the step interval is empty");
  }
  return cap;
}

double DelayHistory::mean_delay() const {
  if (ring_.empty()) return 0.0;
  double sum = 0.0;
  for (double v : ring_) sum += v;
  return sum / static_cast<double>(ring_.size());
}

void record_delay(DelayHistory& history, double nu, double now) {
  if (nu < 0.0) {
    throw ArgumentError("record_delay: negative delay " + format_double(nu) +
                        " for task " + std::to_string(history.task_id_));
  }
  history.ring_.push_back(nu);
  while (history.ring_.size() > history.window_) history.ring_.pop_front();
  ++history.seen_;
  if (now > history.z_) history.z_ = now;
}

double dynamic_multiplier(const DelayHistory& history) {
  return std::log10(std::max(history.mean_delay(), 10.0));
}

}  // namespace amtl
