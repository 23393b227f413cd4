#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "amtl/matrix.hpp"
#include "amtl/numerics.hpp"

namespace amtl {

// One task's private training data. Immutable after construction.
struct TaskDataset {
  DenseMatrix x;       // n_t x d design matrix
  Vector y;            // n_t responses; {-1,+1} for logistic tasks
  LossKind loss_kind = LossKind::Squared;
  std::size_t task_id = 0;

  std::size_t sample_count() const { return x.rows(); }
  std::size_t dim() const { return x.cols(); }
};

// Validates the TaskDataset invariants (n_t >= 1, matching y length, finite
// entries, logistic label alphabet).
TaskDataset make_task(DenseMatrix x, Vector y, LossKind loss_kind, std::size_t task_id);

enum class Regularizer { NuclearNorm, L21 };

// The joint problem: T tasks sharing dimensionality d, coupled through
// lambda * g(W), with an optional l2 term for strict convexity.
struct MtlProblem {
  std::vector<TaskDataset> tasks;
  double lambda = 0.0;
  Regularizer regularizer = Regularizer::NuclearNorm;
  double l2_augment = 0.0;

  std::size_t dim = 0;
  Vector task_lipschitz;  // per-task gradient Lipschitz constants, loss only

  std::size_t task_count() const { return tasks.size(); }
  // Lipschitz constant of the full smooth part, including the l2 term.
  double smooth_lipschitz() const;
};

MtlProblem make_problem(std::vector<TaskDataset> tasks, double lambda,
                        Regularizer regularizer, double l2_augment = 0.0);

// Loss of one task at model vector w.
double loss_value(const TaskDataset& task, std::span<const double> w);

// Gradient of loss_value at w: 2 x^T (x w - y) for the squared loss,
// -x^T (y .* sigmoid(-y .* x w)) for the logistic loss.
Vector loss_gradient(const TaskDataset& task, std::span<const double> w);

// Gradient of the smooth part for one column, including the l2 augment.
Vector smooth_column_gradient(const MtlProblem& problem, std::size_t task_id,
                              std::span<const double> w);

// Full objective: sum of task losses + lambda * g(W) + l2_augment * ||W||_F^2.
double objective(const MtlProblem& problem, const DenseMatrix& w_matrix);

// The coupling penalty g alone (nuclear norm or row-wise l2,1 norm).
double regularizer_value(Regularizer reg, const DenseMatrix& w_matrix);

}  // namespace amtl
