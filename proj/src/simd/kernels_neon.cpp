// AArch64 NEON kernels (float64x2). Advanced SIMD is mandatory on AArch64, so
// no runtime probe is needed beyond the compile-time guard.

#include "kpca/simd.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

#include <cmath>

namespace kpca::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 = vfmaq_f64(s0, vld1q_f64(a + i), vld1q_f64(b + i));
    s1 = vfmaq_f64(s1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  float64x2_t s1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    s0 = vfmaq_f64(s0, d0, d0);
    s1 = vfmaq_f64(s1, d1, d1);
  }
  double sum = vaddvq_f64(vaddq_f64(s0, s1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double l1_distance_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t s0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    s0 = vaddq_f64(s0, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  double sum = vaddvq_f64(s0);
  for (; i < n; ++i) sum += std::fabs(a[i] - b[i]);
  return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// 2x2 dot-product tile: four accumulators share two row loads from each side.
void gemm_abt_neon(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                   double* c, std::size_t ldc, std::size_t m, std::size_t n,
                   std::size_t k) {
  std::size_t i = 0;
  for (; i + 2 <= m; i += 2) {
    const double* a0 = a + i * lda;
    const double* a1 = a0 + lda;
    std::size_t j = 0;
    for (; j + 2 <= n; j += 2) {
      const double* b0 = b + j * ldb;
      const double* b1 = b0 + ldb;
      float64x2_t s00 = vdupq_n_f64(0.0), s01 = vdupq_n_f64(0.0);
      float64x2_t s10 = vdupq_n_f64(0.0), s11 = vdupq_n_f64(0.0);
      std::size_t p = 0;
      for (; p + 2 <= k; p += 2) {
        const float64x2_t va0 = vld1q_f64(a0 + p), va1 = vld1q_f64(a1 + p);
        const float64x2_t vb0 = vld1q_f64(b0 + p), vb1 = vld1q_f64(b1 + p);
        s00 = vfmaq_f64(s00, va0, vb0);
        s01 = vfmaq_f64(s01, va0, vb1);
        s10 = vfmaq_f64(s10, va1, vb0);
        s11 = vfmaq_f64(s11, va1, vb1);
      }
      double r00 = vaddvq_f64(s00), r01 = vaddvq_f64(s01);
      double r10 = vaddvq_f64(s10), r11 = vaddvq_f64(s11);
      for (; p < k; ++p) {
        r00 += a0[p] * b0[p];
        r01 += a0[p] * b1[p];
        r10 += a1[p] * b0[p];
        r11 += a1[p] * b1[p];
      }
      c[i * ldc + j] = r00;
      c[i * ldc + j + 1] = r01;
      c[(i + 1) * ldc + j] = r10;
      c[(i + 1) * ldc + j + 1] = r11;
    }
    for (; j < n; ++j) {
      c[i * ldc + j] = dot_neon(a0, b + j * ldb, k);
      c[(i + 1) * ldc + j] = dot_neon(a1, b + j * ldb, k);
    }
  }
  for (; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] = dot_neon(a + i * lda, b + j * ldb, k);
  }
}

const KernelTable kNeonTable = {
    Level::kNeon, dot_neon, squared_distance_neon, l1_distance_neon, axpy_neon, gemm_abt_neon,
};

}  // namespace

namespace detail {
const KernelTable* neon_table() { return &kNeonTable; }
}  // namespace detail

}  // namespace kpca::simd

#else

namespace kpca::simd::detail {
const KernelTable* neon_table() { return nullptr; }
}  // namespace kpca::simd::detail

#endif
