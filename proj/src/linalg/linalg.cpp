#include "kpca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpca/error.hpp"
#include "kpca/simd.hpp"

namespace kpca {

std::vector<double> column_means(const Matrix& x) {
  if (x.rows() == 0) fail(ErrorKind::kData, "column_means: empty matrix");
  std::vector<double> mean(x.cols(), 0.0);
  const auto& k = simd::active();
  for (std::size_t i = 0; i < x.rows(); ++i) k.axpy(1.0, x.row(i).data(), mean.data(), x.cols());
  const double inv = 1.0 / static_cast<double>(x.rows());
  for (double& v : mean) v *= inv;
  return mean;
}

Matrix covariance(const Matrix& x, std::span<const double> mean) {
  if (mean.size() != x.cols()) {
    fail(ErrorKind::kShape, "covariance: mean length " + std::to_string(mean.size()) +
                                " != column count " + std::to_string(x.cols()));
  }
  Matrix centered = x;
  for (std::size_t i = 0; i < centered.rows(); ++i) {
    auto r = centered.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= mean[j];
  }
  return gram_of_columns(centered);
}

Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorKind::kShape, "pairwise_sq_dist: column mismatch " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.cols()));
  }
  const auto& k = simd::active();
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      out(i, j) = std::max(0.0, k.squared_distance(a.row(i).data(), b.row(j).data(), a.cols()));
    }
  }
  return out;
}

Matrix multiply_abt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorKind::kShape, "multiply_abt: inner dimension mismatch " +
                                std::to_string(a.cols()) + " vs " + std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.rows());
  simd::active().gemm_abt(a.data().data(), a.cols(), b.data().data(), b.cols(), c.data().data(),
                          c.cols(), a.rows(), b.rows(), a.cols());
  return c;
}

Matrix gram_of_rows(const Matrix& y) {
  const std::size_t n = y.rows();
  const std::size_t k = y.cols();
  Matrix g(n, n);
  constexpr std::size_t kBlock = 192;
  const auto& kern = simd::active();
  for (std::size_t i0 = 0; i0 < n; i0 += kBlock) {
    const std::size_t bi = std::min(kBlock, n - i0);
    kern.gemm_abt(y.data().data() + i0 * k, k, y.data().data() + i0 * k, k,
                  g.data().data() + i0 * n + i0, n, bi, n - i0, k);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

Matrix gram_of_columns(const Matrix& x) { return gram_of_rows(x.transposed()); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kShape, "dot: length mismatch");
  return simd::active().dot(a.data(), b.data(), a.size());
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

CovarianceAccumulator::CovarianceAccumulator(std::size_t dim)
    : dim_(dim), shifted_sum_(dim, 0.0), scatter_(dim, dim) {}

void CovarianceAccumulator::add(const Matrix& chunk) {
  if (chunk.rows() == 0) return;
  if (chunk.cols() != dim_) {
    fail(ErrorKind::kShape, "CovarianceAccumulator: chunk has " + std::to_string(chunk.cols()) +
                                " columns, expected " + std::to_string(dim_));
  }
  if (count_ == 0) shift_ = column_means(chunk);
  Matrix shifted = chunk;
  for (std::size_t i = 0; i < shifted.rows(); ++i) {
    auto r = shifted.row(i);
    for (std::size_t j = 0; j < dim_; ++j) {
      r[j] -= shift_[j];
      shifted_sum_[j] += r[j];
    }
  }
  const Matrix part = gram_of_columns(shifted);
  const auto& kern = simd::active();
  kern.axpy(1.0, part.data().data(), scatter_.data().data(), scatter_.size());
  count_ += chunk.rows();
}

std::vector<double> CovarianceAccumulator::mean() const {
  if (count_ == 0) fail(ErrorKind::kData, "CovarianceAccumulator: no rows");
  std::vector<double> m(dim_);
  for (std::size_t j = 0; j < dim_; ++j) {
    m[j] = shift_[j] + shifted_sum_[j] / static_cast<double>(count_);
  }
  return m;
}

Matrix CovarianceAccumulator::covariance() const {
  if (count_ == 0) fail(ErrorKind::kData, "CovarianceAccumulator: no rows");
  Matrix out = scatter_;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t i = 0; i < dim_; ++i) {
    const double si = shifted_sum_[i] * inv;
    for (std::size_t j = 0; j < dim_; ++j) out(i, j) -= si * shifted_sum_[j];
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < i; ++j) out(i, j) = out(j, i);
  }
  return out;
}

}  // namespace kpca
