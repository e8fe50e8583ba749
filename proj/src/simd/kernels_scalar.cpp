// Scalar reference kernels. Every vectorized variant is tested against these.

#include <cmath>

#include "kpca/simd.hpp"

namespace kpca::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double l1_distance_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::fabs(a[i] - b[i]);
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemm_abt_scalar(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                     double* c, std::size_t ldc, std::size_t m, std::size_t n,
                     std::size_t k) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * ldc + j] = dot_scalar(a + i * lda, b + j * ldb, k);
    }
  }
}

}  // namespace

namespace detail {
const KernelTable kScalarTable = {
    Level::kScalar,    dot_scalar,   squared_distance_scalar, l1_distance_scalar,
    axpy_scalar,       gemm_abt_scalar,
};
}  // namespace detail

}  // namespace kpca::simd
