#pragma once

#include <cstddef>
#include <span>

#include "amtl/matrix.hpp"
#include "amtl/model.hpp"
#include "amtl/numerics.hpp"

namespace amtl {

// Output of the singular-value soft-thresholding prox. factors_used holds the
// factorization of the input, so callers can inspect the spectrum that was
// shrunk; threshold is the eta*lambda product that was applied.
struct ProxResult {
  DenseMatrix w_matrix;
  SvdFactors factors_used;
  double threshold = 0.0;
};

// Prox of threshold * ||.||_*: shrink every singular value by threshold.
ProxResult prox_nuclear(const DenseMatrix& v_hat, double threshold);

// Prox of threshold * ||.||_{2,1}: scale each row by max(0, 1 - threshold/||row||).
// Zero rows stay zero.
DenseMatrix prox_l21(const DenseMatrix& v_hat, double threshold);

// Backward step for the problem's regularizer with threshold eta * lambda.
DenseMatrix apply_prox(const MtlProblem& problem, const DenseMatrix& v_hat,
                       double eta);

// One task's proposed block value: (I - eta grad_t)((prox of snapshot)_t).
struct BlockCandidate {
  std::size_t task_id = 0;
  Vector v_new;
};

// Full backward step on the snapshot, forward step on one task block.
// eta must lie in (0, 2/L) with L the problem's smooth Lipschitz constant.
BlockCandidate backward_forward_block(const MtlProblem& problem,
                                      const DenseMatrix& v_snapshot,
                                      std::size_t task_id, double eta);

// Relaxed fixed-point update: v_t + multiplier * eta_k * (candidate - v_t).
// The static scheme passes multiplier = 1.
Vector km_update(std::span<const double> v_t, const BlockCandidate& candidate,
                 double eta_k, double multiplier);

// The extra backward step that maps the auxiliary fixed point V* to W*.
DenseMatrix recover_w(const MtlProblem& problem, const DenseMatrix& v_final,
                      double eta);

// ||w - prox(w - eta grad f(w))||_F / max(1, ||w||_F); zero exactly at
// fixed points of the forward-backward map.
double optimality_residual(const MtlProblem& problem, const DenseMatrix& w,
                           double eta);

// Validates eta in (0, 2/L); throws ConfigError otherwise.
void require_admissible_eta(const MtlProblem& problem, double eta);

}  // namespace amtl
