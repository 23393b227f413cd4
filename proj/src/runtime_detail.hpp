#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "amtl/runtime.hpp"

namespace amtl::detail {

inline std::int64_t seconds_to_ns(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * 1e9));
}

inline double ns_to_seconds(std::int64_t ns) {
  return static_cast<double>(ns) / 1e9;
}

struct EngineSetup {
  std::size_t t_count = 0;
  std::size_t dim = 0;
  double eta = 0.0;
  double eta_k = 0.0;
  StepPolicy policy;
  std::int64_t prox_cost_ns = 0;
  std::vector<std::int64_t> grad_cost_ns;
  std::size_t objective_every = 1;
};

EngineSetup prepare_engine(const MtlProblem& problem, const RunConfig& config,
                           Mode expected_mode);

RunResult finalize_run(const MtlProblem& problem, const RunConfig& config,
                       const EngineSetup& setup, DenseMatrix v,
                       std::vector<UpdateEvent> events,
                       std::vector<std::size_t> counts);

RunResult run_amtl_virtual(const MtlProblem& problem, const RunConfig& config);
RunResult run_smtl_virtual(const MtlProblem& problem, const RunConfig& config);
RunResult run_amtl_real(const MtlProblem& problem, const RunConfig& config);
RunResult run_smtl_real(const MtlProblem& problem, const RunConfig& config);

}  // namespace amtl::detail
