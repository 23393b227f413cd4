#include "amtl/model.hpp"

#include <algorithm>
#include <cmath>

#include "amtl/errors.hpp"

namespace amtl {

namespace {

// log(1 + exp(t)) without overflow.
double log1p_exp(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// sigmoid(-u) = 1 / (1 + exp(u)), evaluated from the safe side.
double sigmoid_neg(double u) {
  if (u >= 0.0) {
    const double e = std::exp(-u);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(u));
}

void require_dim(const TaskDataset& task, std::span<const double> w, const char* op) {
  if (w.size() != task.dim()) {
    throw DimensionError(std::string(op) + ": model vector length " +
                         std::to_string(w.size()) + " for task " +
                         std::to_string(task.task_id) + " with d=" +
                         std::to_string(task.dim()));
  }
}

}  // namespace

TaskDataset make_task(DenseMatrix x, Vector y, LossKind loss_kind,
                      std::size_t task_id) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw DimensionError("make_task: task " + std::to_string(task_id) +
                         " has empty design matrix " + x.shape_string());
  }
  if (y.size() != x.rows()) {
    throw DimensionError("make_task: task " + std::to_string(task_id) + " has " +
                         std::to_string(y.size()) + " labels for " +
                         std::to_string(x.rows()) + " samples");
  }
  if (!x.is_finite() || !all_finite(y)) {
    throw ArgumentError("make_task: task " + std::to_string(task_id) +
                        " contains non-finite values");
  }
  if (loss_kind == LossKind::Logistic) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] != 1.0 && y[i] != -1.0) {
        throw ArgumentError("make_task: logistic task " + std::to_string(task_id) +
                            " has label " + std::to_string(y[i]) + " at sample " +
                            std::to_string(i) + "; expected -1 or +1");
      }
    }
  }
  return TaskDataset{std::move(x), std::move(y), loss_kind, task_id};
}

double MtlProblem::smooth_lipschitz() const {
  double m = 0.0;
  for (double l : task_lipschitz) m = std::max(m, l);
  return m + 2.0 * l2_augment;
}

MtlProblem make_problem(std::vector<TaskDataset> tasks, double lambda,
                        Regularizer regularizer, double l2_augment) {
  if (tasks.empty()) throw ArgumentError("make_problem: no tasks");
  if (lambda < 0.0) throw ArgumentError("make_problem: negative lambda");
  if (l2_augment < 0.0) throw ArgumentError("make_problem: negative l2_augment");
  const std::size_t d = tasks.front().dim();
  for (const TaskDataset& t : tasks) {
    if (t.dim() != d) {
      throw DimensionError("make_problem: task " + std::to_string(t.task_id) +
                           " has d=" + std::to_string(t.dim()) +
                           ", expected d=" + std::to_string(d));
    }
  }
  MtlProblem p;
  p.tasks = std::move(tasks);
  p.lambda = lambda;
  p.regularizer = regularizer;
  p.l2_augment = l2_augment;
  p.dim = d;
  p.task_lipschitz.reserve(p.tasks.size());
  for (const TaskDataset& t : p.tasks) {
    p.task_lipschitz.push_back(lipschitz_bound(t.x, t.loss_kind));
  }
  return p;
}

double loss_value(const TaskDataset& task, std::span<const double> w) {
  require_dim(task, w, "loss_value");
  const Vector z = gemv(task.x, w);
  double total = 0.0;
  if (task.loss_kind == LossKind::Squared) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double r = z[i] - task.y[i];
      total += r * r;
    }
  } else {
    for (std::size_t i = 0; i < z.size(); ++i) {
      total += log1p_exp(-task.y[i] * z[i]);
    }
  }
  return total;
}

Vector loss_gradient(const TaskDataset& task, std::span<const double> w) {
  require_dim(task, w, "loss_gradient");
  Vector z = gemv(task.x, w);
  if (task.loss_kind == LossKind::Squared) {
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.0 * (z[i] - task.y[i]);
  } else {
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = -task.y[i] * sigmoid_neg(task.y[i] * z[i]);
    }
  }
  return gemv_transposed(task.x, z);
}

Vector smooth_column_gradient(const MtlProblem& problem, std::size_t task_id,
                              std::span<const double> w) {
  Vector g = loss_gradient(problem.tasks.at(task_id), w);
  if (problem.l2_augment > 0.0) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 2.0 * problem.l2_augment * w[i];
  }
  return g;
}

double regularizer_value(Regularizer reg, const DenseMatrix& w_matrix) {
  if (reg == Regularizer::NuclearNorm) return nuclear_norm(w_matrix);
  double sum = 0.0;
  for (std::size_t i = 0; i < w_matrix.rows(); ++i) sum += norm2(w_matrix.row(i));
  return sum;
}

double objective(const MtlProblem& problem, const DenseMatrix& w_matrix) {
  if (w_matrix.rows() != problem.dim || w_matrix.cols() != problem.task_count()) {
    throw DimensionError("objective: model matrix " + w_matrix.shape_string() +
                         ", expected " + std::to_string(problem.dim) + "x" +
                         std::to_string(problem.task_count()));
  }
  double total = 0.0;
  for (std::size_t t = 0; t < problem.task_count(); ++t) {
    total += loss_value(problem.tasks[t], w_matrix.col(t));
  }
  if (problem.lambda > 0.0) {
    total += problem.lambda * regularizer_value(problem.regularizer, w_matrix);
  }
  if (problem.l2_augment > 0.0) {
    const double f = w_matrix.frobenius_norm();
    total += problem.l2_augment * f * f;
  }
  return total;
}

}  // namespace amtl
