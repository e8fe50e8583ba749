#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kpca/matrix.hpp"

namespace kpca {

/// Eigenpairs of a real symmetric matrix.
///
/// Eigenvalues are sorted in descending order and column j of `eigenvectors`
/// belongs to eigenvalue j. Each column is sign-normalized so that its entry of
/// largest magnitude is positive, which makes serialized models byte-stable.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;
};

/// Orders at or below this size go through the Jacobi solver; larger ones use
/// the tridiagonal divide-and-conquer backend.
inline constexpr std::size_t kJacobiMaxOrder = 128;

EigenDecomposition sym_eigen(const Matrix& a);

/// Cyclic Jacobi rotations. Stops when the off-diagonal Frobenius norm falls
/// below 1e-12 * ||A||_F; throws kConvergence after 100 sweeps.
EigenDecomposition sym_eigen_jacobi(const Matrix& a);

/// LAPACK dsyevd.
EigenDecomposition sym_eigen_tridiagonal(const Matrix& a);

std::vector<double> column_means(const Matrix& x);

/// Unnormalized scatter matrix sum_i (x_i - mean)(x_i - mean)^T.
Matrix covariance(const Matrix& x, std::span<const double> mean);

/// Entry (i, j) = ||a_i - b_j||^2, clamped at zero.
Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b);

/// A * B^T through the active SIMD gemm.
Matrix multiply_abt(const Matrix& a, const Matrix& b);

/// X^T X using only the upper block triangle, mirrored.
Matrix gram_of_columns(const Matrix& x);

/// X X^T, same blocking.
Matrix gram_of_rows(const Matrix& x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

/// Streaming scatter-matrix accumulator for row sets that do not fit in memory.
///
/// Rows are shifted by the mean of the first chunk before accumulation, which
/// keeps the final mean correction small relative to the scatter.
class CovarianceAccumulator {
 public:
  explicit CovarianceAccumulator(std::size_t dim);

  void add(const Matrix& chunk);

  std::size_t count() const noexcept { return count_; }
  std::size_t dim() const noexcept { return dim_; }
  std::vector<double> mean() const;
  Matrix covariance() const;

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> shift_;
  std::vector<double> shifted_sum_;
  Matrix scatter_;
};

}  // namespace kpca
