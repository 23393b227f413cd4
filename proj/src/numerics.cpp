#include "amtl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "amtl/errors.hpp"
#include "amtl/rng.hpp"

namespace amtl {

namespace {

constexpr int kMaxJacobiSweeps = 60;
constexpr double kJacobiTol = 1e-12;
// Columns this small relative to the largest are cancellation residue of an
// exactly rank-deficient input; flushing them keeps the pair criterion away
// from denormal underflow, where it could never be satisfied.
constexpr double kColumnFlushTol = 1e-130;

// Orthogonalize the columns of g in place by plane rotations, accumulating
// the rotations into v. Requires g.rows() >= g.cols().
void one_sided_jacobi(DenseMatrix& g, DenseMatrix& v) {
  const std::size_t m = g.rows();
  const std::size_t n = g.cols();
  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double max_norm = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      max_norm = std::max(max_norm, norm2(g.col(j)));
    }
    const double flush = kColumnFlushTol * max_norm;
    for (std::size_t j = 0; j < n; ++j) {
      if (const double nj = norm2(g.col(j)); nj > 0.0 && nj <= flush) {
        for (std::size_t i = 0; i < m; ++i) g(i, j) = 0.0;
      }
    }
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double gp = g(i, p);
          const double gq = g(i, q);
          alpha += gp * gp;
          beta += gq * gq;
          gamma += gp * gq;
        }
        // Norms multiplied after the square roots: alpha * beta underflows
        // for near-zero columns.
        if (gamma == 0.0 ||
            std::abs(gamma) <= kJacobiTol * (std::sqrt(alpha) * std::sqrt(beta))) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < m; ++i) {
          const double gp = g(i, p);
          const double gq = g(i, q);
          g(i, p) = c * gp - s * gq;
          g(i, q) = s * gp + c * gq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vp = v(i, p);
          const double vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericalError("thin_svd: Jacobi sweeps did not converge for " +
                       g.shape_string() + " input");
}

// Fill u's column j with a unit vector orthogonal to columns [0, j). Used for
// singular values that are exactly zero, where the data carries no direction.
void complete_column(DenseMatrix& u, std::size_t j) {
  const std::size_t m = u.rows();
  // Residual mass of each canonical basis vector against the built columns.
  std::size_t best = 0;
  double best_res = -1.0;
  for (std::size_t i = 0; i < m; ++i) {
    double proj = 0.0;
    for (std::size_t k = 0; k < j; ++k) proj += u(i, k) * u(i, k);
    const double res = 1.0 - proj;
    if (res > best_res) {
      best_res = res;
      best = i;
    }
  }
  Vector w(m, 0.0);
  w[best] = 1.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t k = 0; k < j; ++k) {
      double coeff = 0.0;
      for (std::size_t i = 0; i < m; ++i) coeff += u(i, k) * w[i];
      for (std::size_t i = 0; i < m; ++i) w[i] -= coeff * u(i, k);
    }
  }
  const double nrm = norm2(w);
  for (std::size_t i = 0; i < m; ++i) u(i, j) = w[i] / nrm;
}

// SVD of a tall-or-square matrix (rows >= cols) with cols singular values.
SvdFactors svd_tall(const DenseMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix g = a;
  DenseMatrix v = DenseMatrix::identity(n);
  one_sided_jacobi(g, v);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(g.col(j));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

  SvdFactors f;
  f.u = DenseMatrix(m, n);
  f.q = DenseMatrix(n, n);
  f.s.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    f.s[j] = norms[src];
    if (norms[src] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) f.u(i, j) = g(i, src) / norms[src];
    }
    for (std::size_t i = 0; i < n; ++i) f.q(i, j) = v(i, src);
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (f.s[j] == 0.0) complete_column(f.u, j);
  }
  return f;
}

void apply_sign_convention(SvdFactors& f) {
  const std::size_t m = f.u.rows();
  const std::size_t n = f.u.cols();
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double mag = std::abs(f.u(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (f.u(arg, j) < 0.0) {
      for (std::size_t i = 0; i < m; ++i) f.u(i, j) = -f.u(i, j);
      for (std::size_t i = 0; i < f.q.rows(); ++i) f.q(i, j) = -f.q(i, j);
    }
  }
}

}  // namespace

SvdFactors thin_svd(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError("thin_svd: empty input " + a.shape_string());
  }
  if (!a.is_finite()) {
    throw ArgumentError("thin_svd: non-finite entries in " + a.shape_string() +
                        " input");
  }
  SvdFactors f;
  if (a.rows() >= a.cols()) {
    f = svd_tall(a);
  } else {
    SvdFactors t = svd_tall(a.transpose());
    f.u = std::move(t.q);
    f.s = std::move(t.s);
    f.q = std::move(t.u);
  }
  apply_sign_convention(f);
  return f;
}

double nuclear_norm(const DenseMatrix& a) {
  const SvdFactors f = thin_svd(a);
  double sum = 0.0;
  for (double s : f.s) sum += s;
  return sum;
}

double spectral_norm(const DenseMatrix& a, double rel_tol) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw DimensionError("spectral_norm: empty input " + a.shape_string());
  }
  // Fixed-seed start vector; deterministic and, for any non-adversarial input,
  // not orthogonal to the leading singular subspace.
  Rng rng(0x5eed0f5eed0f5eedULL);
  Vector v(a.cols());
  for (double& x : v) x = rng.uniform01() - 0.5;
  const double vn = norm2(v);
  for (double& x : v) x /= vn;

  double sigma = 0.0;
  constexpr int kMaxIter = 10000;
  for (int it = 0; it < kMaxIter; ++it) {
    const Vector w = gemv(a, v);
    const double next = norm2(w);  // Rayleigh estimate ||a v|| for unit v
    if (next == 0.0) return 0.0;
    Vector u = gemv_transposed(a, w);
    const double un = norm2(u);
    if (un == 0.0) return next;
    for (double& x : u) x /= un;
    v = std::move(u);
    if (it > 0 && std::abs(next - sigma) <= rel_tol * next) {
      return next;
    }
    sigma = next;
  }
  return sigma;
}

double lipschitz_bound(const DenseMatrix& x, LossKind loss_kind) {
  if (x.rows() == 0 || x.cols() == 0) {
    throw DimensionError("lipschitz_bound: empty input " + x.shape_string());
  }
  const double sigma = spectral_norm(x);
  const double bound =
      loss_kind == LossKind::Squared ? 2.0 * sigma * sigma : sigma * sigma / 4.0;
  return std::max(bound, kLipschitzFloor);
}

}  // namespace amtl
