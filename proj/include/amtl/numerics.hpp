#pragma once

#include <vector>

#include "amtl/matrix.hpp"

namespace amtl {

enum class LossKind { Squared, Logistic };

// Thin SVD a = u * diag(s) * q^T with r = min(rows, cols) columns.
// u and q have orthonormal columns; s is non-negative and non-increasing.
// Sign convention: the largest-magnitude entry of each column of u is
// non-negative (ties resolved toward the lowest row index), so repeated
// factorizations of the same input are bitwise identical.
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> s;
  DenseMatrix q;
};

// One-sided Jacobi. Deterministic cyclic sweep order; throws NumericalError
// (carrying the matrix dimensions) if the sweep cap is exhausted.
SvdFactors thin_svd(const DenseMatrix& a);

double nuclear_norm(const DenseMatrix& a);

// Largest singular value by power iteration on a^T a, relative tolerance on
// the Rayleigh estimate.
double spectral_norm(const DenseMatrix& a, double rel_tol = 1e-6);

// Gradient Lipschitz constant of one task's loss: 2*sigma_max(x)^2 for the
// squared loss, sigma_max(x)^2/4 for the logistic loss. An all-zero matrix
// yields the degenerate-task floor 1e-12.
double lipschitz_bound(const DenseMatrix& x, LossKind loss_kind);

inline constexpr double kLipschitzFloor = 1e-12;

}  // namespace amtl
