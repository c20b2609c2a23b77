#include "wifidist/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace wifidist {

namespace {

// In-place Householder QR of A (n x m, n >= 1), applying the same
// transformations to rhs. Afterwards the upper triangle of A holds R.
// Returns false when a diagonal of R falls below the rank tolerance.
bool householder_qr(Matrix& A, std::vector<double>& rhs) {
  const std::size_t n = A.rows, m = A.cols;
  double max_diag = 0.0;
  bool full_rank = true;

  for (std::size_t k = 0; k < m && k < n; ++k) {
    // Householder vector for column k, rows k..n-1.
    double norm = 0.0;
    for (std::size_t i = k; i < n; ++i) norm += A.at(i, k) * A.at(i, k);
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      full_rank = false;
      continue;
    }
    const double alpha = A.at(k, k) >= 0.0 ? -norm : norm;
    std::vector<double> v(n - k);
    v[0] = A.at(k, k) - alpha;
    for (std::size_t i = k + 1; i < n; ++i) v[i - k] = A.at(i, k);
    double vtv = 0.0;
    for (double x : v) vtv += x * x;
    if (vtv == 0.0) {
      full_rank = false;
      continue;
    }
    A.at(k, k) = alpha;
    for (std::size_t i = k + 1; i < n; ++i) A.at(i, k) = 0.0;

    for (std::size_t j = k + 1; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = k; i < n; ++i) s += v[i - k] * A.at(i, j);
      s = 2.0 * s / vtv;
      for (std::size_t i = k; i < n; ++i) A.at(i, j) -= s * v[i - k];
    }
    double s = 0.0;
    for (std::size_t i = k; i < n; ++i) s += v[i - k] * rhs[i];
    s = 2.0 * s / vtv;
    for (std::size_t i = k; i < n; ++i) rhs[i] -= s * v[i - k];

    max_diag = std::max(max_diag, std::abs(alpha));
  }

  const double tol = std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(n, m)) * max_diag;
  for (std::size_t k = 0; k < m; ++k) {
    if (k >= n || std::abs(A.at(k, k)) <= tol) full_rank = false;
  }
  return full_rank;
}

}  // namespace

LstsqResult lstsq(const Matrix& A, std::span<const double> b) {
  assert(A.rows == b.size());
  Matrix R = A;
  std::vector<double> rhs(b.begin(), b.end());
  const bool full_rank = householder_qr(R, rhs);
  if (!full_rank) {
    return {lstsq_min_norm_svd(A, b), true};
  }
  const std::size_t m = A.cols;
  std::vector<double> x(m, 0.0);
  for (std::size_t kk = m; kk-- > 0;) {
    double s = rhs[kk];
    for (std::size_t j = kk + 1; j < m; ++j) s -= R.at(kk, j) * x[j];
    x[kk] = s / R.at(kk, kk);
  }
  return {std::move(x), false};
}

std::vector<double> lstsq_min_norm_svd(const Matrix& A,
                                       std::span<const double> b) {
  assert(A.rows == b.size());
  const std::size_t n = A.rows, m = A.cols;

  // One-sided Jacobi: rotate column pairs of U (a working copy of A) until
  // mutually orthogonal, accumulating the rotations in V.
  Matrix U = A;
  Matrix V(m, m);
  for (std::size_t i = 0; i < m; ++i) V.at(i, i) = 1.0;

  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 60; ++sweep) {
    bool converged = true;
    for (std::size_t p = 0; p + 1 < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          app += U.at(i, p) * U.at(i, p);
          aqq += U.at(i, q) * U.at(i, q);
          apq += U.at(i, p) * U.at(i, q);
        }
        if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0)
          continue;
        converged = false;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double up = U.at(i, p), uq = U.at(i, q);
          U.at(i, p) = c * up - s * uq;
          U.at(i, q) = s * up + c * uq;
        }
        for (std::size_t i = 0; i < m; ++i) {
          const double vp = V.at(i, p), vq = V.at(i, q);
          V.at(i, p) = c * vp - s * vq;
          V.at(i, q) = s * vp + c * vq;
        }
      }
    }
    if (converged) break;
  }

  std::vector<double> sigma(m, 0.0);
  double sigma_max = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += U.at(i, j) * U.at(i, j);
    sigma[j] = std::sqrt(s);
    sigma_max = std::max(sigma_max, sigma[j]);
  }

  // x = V * diag(1/sigma) * U^T b, dropping directions below tolerance.
  const double tol =
      eps * static_cast<double>(std::max(n, m)) * sigma_max;
  std::vector<double> x(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (sigma[j] <= tol) continue;
    double utb = 0.0;
    for (std::size_t i = 0; i < n; ++i) utb += (U.at(i, j) / sigma[j]) * b[i];
    const double coef = utb / sigma[j];
    for (std::size_t i = 0; i < m; ++i) x[i] += coef * V.at(i, j);
  }
  return x;
}

}  // namespace wifidist
