#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wifidist {

/// Minimal row-major dense matrix. Designs here are tall and narrow
/// (n rows, <= 15 columns), so nothing fancier is warranted.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data.data() + r * cols, cols};
  }
  std::span<double> row(std::size_t r) {
    return {data.data() + r * cols, cols};
  }
};

struct LstsqResult {
  std::vector<double> x;
  bool rank_deficient = false;
};

/// Least squares min ||Ax - b|| via Householder QR. When A is detected as
/// rank-deficient the minimum-norm solution is returned instead (computed
/// by Jacobi SVD) and the flag is set.
LstsqResult lstsq(const Matrix& A, std::span<const double> b);

/// Minimum-norm least-squares solution via one-sided Jacobi SVD.
std::vector<double> lstsq_min_norm_svd(const Matrix& A,
                                       std::span<const double> b);

}  // namespace wifidist
