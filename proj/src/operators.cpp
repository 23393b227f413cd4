#include "amtl/operators.hpp"

#include <algorithm>
#include <cmath>

#include "amtl/errors.hpp"
#include "amtl/format.hpp"

namespace amtl {

ProxResult prox_nuclear(const DenseMatrix& v_hat, double threshold) {
  if (threshold < 0.0) {
    throw ArgumentError("prox_nuclear: negative threshold " + format_double(threshold));
  }
  ProxResult out;
  out.factors_used = thin_svd(v_hat);
  out.threshold = threshold;
  const std::size_t r = out.factors_used.s.size();
  std::vector<double> shrunk(r);
  for (std::size_t i = 0; i < r; ++i) {
    shrunk[i] = std::max(0.0, out.factors_used.s[i] - threshold);
  }
  // u * diag(shrunk) * q^T
  const DenseMatrix& u = out.factors_used.u;
  const DenseMatrix& q = out.factors_used.q;
  DenseMatrix w(v_hat.rows(), v_hat.cols());
  for (std::size_t k = 0; k < r; ++k) {
    if (shrunk[k] == 0.0) continue;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      const double uik = u(i, k) * shrunk[k];
      for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) += uik * q(j, k);
    }
  }
  out.w_matrix = std::move(w);
  return out;
}

DenseMatrix prox_l21(const DenseMatrix& v_hat, double threshold) {
  if (threshold < 0.0) {
    throw ArgumentError("prox_l21: negative threshold " + format_double(threshold));
  }
  DenseMatrix w = v_hat;
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double nrm = norm2(w.row(i));
    const double scale = nrm > threshold ? 1.0 - threshold / nrm : 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) *= scale;
  }
  return w;
}

DenseMatrix apply_prox(const MtlProblem& problem, const DenseMatrix& v_hat,
                       double eta) {
  const double threshold = eta * problem.lambda;
  if (threshold == 0.0) return v_hat;  // the prox of 0*g is the identity
  if (problem.regularizer == Regularizer::NuclearNorm) {
    return prox_nuclear(v_hat, threshold).w_matrix;
  }
  return prox_l21(v_hat, threshold);
}

void require_admissible_eta(const MtlProblem& problem, double eta) {
  const double cap = 2.0 / problem.smooth_lipschitz();
  if (!(eta > 0.0) || !(eta < cap)) {
    throw ConfigError("step size eta=" + format_double(eta) +
                      " outside the admissible interval (0, " + format_double(cap) +
                      ") = (0, 2/L)");
  }
}

BlockCandidate backward_forward_block(const MtlProblem& problem,
                                      const DenseMatrix& v_snapshot,
                                      std::size_t task_id, double eta) {
  require_admissible_eta(problem, eta);
  const DenseMatrix p = apply_prox(problem, v_snapshot, eta);
  Vector col = p.col(task_id);
  const Vector grad = smooth_column_gradient(problem, task_id, col);
  for (std::size_t i = 0; i < col.size(); ++i) col[i] -= eta * grad[i];
  return BlockCandidate{task_id, std::move(col)};
}

Vector km_update(std::span<const double> v_t, const BlockCandidate& candidate,
                 double eta_k, double multiplier) {
  if (candidate.v_new.size() != v_t.size()) {
    throw DimensionError("km_update: candidate length " +
                         std::to_string(candidate.v_new.size()) + " vs block length " +
                         std::to_string(v_t.size()));
  }
  if (!(eta_k > 0.0)) {
    throw ArgumentError("km_update: relaxation step must be positive, got " +
                        format_double(eta_k));
  }
  if (!(multiplier >= 1.0)) {
    throw ArgumentError("km_update: multiplier must be at least 1, got " +
                        format_double(multiplier));
  }
  if (!all_finite(candidate.v_new)) {
    throw NumericalError("km_update: non-finite candidate for task " +
                         std::to_string(candidate.task_id));
  }
  const double step = multiplier * eta_k;
  Vector out(v_t.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = v_t[i] + step * (candidate.v_new[i] - v_t[i]);
  }
  return out;
}

DenseMatrix recover_w(const MtlProblem& problem, const DenseMatrix& v_final,
                      double eta) {
  return apply_prox(problem, v_final, eta);
}

double optimality_residual(const MtlProblem& problem, const DenseMatrix& w,
                           double eta) {
  require_admissible_eta(problem, eta);
  DenseMatrix shifted = w;
  for (std::size_t t = 0; t < problem.task_count(); ++t) {
    const Vector grad = smooth_column_gradient(problem, t, w.col(t));
    for (std::size_t i = 0; i < w.rows(); ++i) shifted(i, t) -= eta * grad[i];
  }
  const DenseMatrix mapped = apply_prox(problem, shifted, eta);
  const double gap = subtract(w, mapped).frobenius_norm();
  return gap / std::max(1.0, w.frobenius_norm());
}

}  // namespace amtl
