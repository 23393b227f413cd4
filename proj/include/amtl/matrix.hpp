#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace amtl {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. The workhorse container for task data
// matrices x_t and the d-by-T model matrices.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  DenseMatrix(std::size_t rows, std::size_t cols, Vector entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }

  Vector col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);

  DenseMatrix transpose() const;
  double frobenius_norm() const;
  double max_abs() const;
  bool is_finite() const;
  std::string shape_string() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

// Exact standard products. Shape mismatches raise DimensionError naming both
// operand shapes.
DenseMatrix gemm(const DenseMatrix& a, const DenseMatrix& b);
Vector gemv(const DenseMatrix& a, std::span<const double> x);

// y = a^T x for a with rows() == x.size(). Saves materializing transposes in
// the gradient kernels.
Vector gemv_transposed(const DenseMatrix& a, std::span<const double> x);

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix subtract(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix scale(const DenseMatrix& a, double s);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);
bool all_finite(std::span<const double> v);

}  // namespace amtl
