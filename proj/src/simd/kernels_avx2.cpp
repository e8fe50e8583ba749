// AVX2 + FMA kernels. This translation unit is built with -mavx2 -mfma; it is
// only entered after the dispatcher has confirmed CPU support.

#include "kpca/simd.hpp"

#if defined(__x86_64__) && defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace kpca::simd {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
    s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), s2);
    s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), s3);
  }
  for (; i + 4 <= n; i += 4) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
  }
  double sum = hsum(_mm256_add_pd(_mm256_add_pd(s0, s1), _mm256_add_pd(s2, s3)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

double squared_distance_avx2(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    s0 = _mm256_fmadd_pd(d0, d0, s0);
    s1 = _mm256_fmadd_pd(d1, d1, s1);
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    s0 = _mm256_fmadd_pd(d, d, s0);
  }
  double sum = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

double l1_distance_avx2(const double* a, const double* b, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    s0 = _mm256_add_pd(s0, _mm256_andnot_pd(sign, d0));
    s1 = _mm256_add_pd(s1, _mm256_andnot_pd(sign, d1));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    s0 = _mm256_add_pd(s0, _mm256_andnot_pd(sign, d));
  }
  double sum = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) sum += std::fabs(a[i] - b[i]);
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// Packed GEMM, 6x8 register tile. Panels of A hold kMr rows interleaved by k;
// panels of B hold kNr rows interleaved by k, zero-padded at the edges.
constexpr std::size_t kMr = 6;
constexpr std::size_t kNr = 8;
constexpr std::size_t kKc = 256;
constexpr std::size_t kMc = 96;
constexpr std::size_t kNc = 2048;

void pack_panels(const double* src, std::size_t ld, std::size_t count, std::size_t kc,
                 std::size_t width, double* out) {
  for (std::size_t r0 = 0; r0 < count; r0 += width) {
    const std::size_t live = std::min(width, count - r0);
    for (std::size_t p = 0; p < kc; ++p) {
      std::size_t r = 0;
      for (; r < live; ++r) *out++ = src[(r0 + r) * ld + p];
      for (; r < width; ++r) *out++ = 0.0;
    }
  }
}

void micro_kernel(std::size_t kc, const double* ap, const double* bp, double* c,
                  std::size_t ldc, bool accumulate, std::size_t rows, std::size_t cols) {
  __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
  __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
  __m256d c20 = _mm256_setzero_pd(), c21 = _mm256_setzero_pd();
  __m256d c30 = _mm256_setzero_pd(), c31 = _mm256_setzero_pd();
  __m256d c40 = _mm256_setzero_pd(), c41 = _mm256_setzero_pd();
  __m256d c50 = _mm256_setzero_pd(), c51 = _mm256_setzero_pd();

  for (std::size_t p = 0; p < kc; ++p) {
    const __m256d b0 = _mm256_loadu_pd(bp);
    const __m256d b1 = _mm256_loadu_pd(bp + 4);
    __m256d a = _mm256_broadcast_sd(ap + 0);
    c00 = _mm256_fmadd_pd(a, b0, c00);
    c01 = _mm256_fmadd_pd(a, b1, c01);
    a = _mm256_broadcast_sd(ap + 1);
    c10 = _mm256_fmadd_pd(a, b0, c10);
    c11 = _mm256_fmadd_pd(a, b1, c11);
    a = _mm256_broadcast_sd(ap + 2);
    c20 = _mm256_fmadd_pd(a, b0, c20);
    c21 = _mm256_fmadd_pd(a, b1, c21);
    a = _mm256_broadcast_sd(ap + 3);
    c30 = _mm256_fmadd_pd(a, b0, c30);
    c31 = _mm256_fmadd_pd(a, b1, c31);
    a = _mm256_broadcast_sd(ap + 4);
    c40 = _mm256_fmadd_pd(a, b0, c40);
    c41 = _mm256_fmadd_pd(a, b1, c41);
    a = _mm256_broadcast_sd(ap + 5);
    c50 = _mm256_fmadd_pd(a, b0, c50);
    c51 = _mm256_fmadd_pd(a, b1, c51);
    ap += kMr;
    bp += kNr;
  }

  alignas(32) double tile[kMr][kNr];
  _mm256_store_pd(tile[0], c00);
  _mm256_store_pd(tile[0] + 4, c01);
  _mm256_store_pd(tile[1], c10);
  _mm256_store_pd(tile[1] + 4, c11);
  _mm256_store_pd(tile[2], c20);
  _mm256_store_pd(tile[2] + 4, c21);
  _mm256_store_pd(tile[3], c30);
  _mm256_store_pd(tile[3] + 4, c31);
  _mm256_store_pd(tile[4], c40);
  _mm256_store_pd(tile[4] + 4, c41);
  _mm256_store_pd(tile[5], c50);
  _mm256_store_pd(tile[5] + 4, c51);

  for (std::size_t r = 0; r < rows; ++r) {
    double* out = c + r * ldc;
    if (accumulate) {
      for (std::size_t j = 0; j < cols; ++j) out[j] += tile[r][j];
    } else {
      for (std::size_t j = 0; j < cols; ++j) out[j] = tile[r][j];
    }
  }
}

void gemm_abt_avx2(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                   double* c, std::size_t ldc, std::size_t m, std::size_t n,
                   std::size_t k) {
  if (m == 0 || n == 0) return;
  if (k == 0) {
    for (std::size_t i = 0; i < m; ++i) std::fill_n(c + i * ldc, n, 0.0);
    return;
  }
  // Tiny products are dominated by packing overhead.
  if (m * n * k < 4096) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) c[i * ldc + j] = dot_avx2(a + i * lda, b + j * ldb, k);
    }
    return;
  }

  thread_local std::vector<double> a_pack;
  thread_local std::vector<double> b_pack;
  a_pack.resize(((kMc + kMr - 1) / kMr) * kMr * kKc);
  b_pack.resize(((kNc + kNr - 1) / kNr) * kNr * kKc);

  for (std::size_t jc = 0; jc < n; jc += kNc) {
    const std::size_t nc = std::min(kNc, n - jc);
    for (std::size_t pc = 0; pc < k; pc += kKc) {
      const std::size_t kc = std::min(kKc, k - pc);
      const bool accumulate = pc > 0;
      pack_panels(b + jc * ldb + pc, ldb, nc, kc, kNr, b_pack.data());
      for (std::size_t ic = 0; ic < m; ic += kMc) {
        const std::size_t mc = std::min(kMc, m - ic);
        pack_panels(a + ic * lda + pc, lda, mc, kc, kMr, a_pack.data());
        for (std::size_t jr = 0; jr < nc; jr += kNr) {
          const double* bp = b_pack.data() + (jr / kNr) * kNr * kc;
          const std::size_t cols = std::min(kNr, nc - jr);
          for (std::size_t ir = 0; ir < mc; ir += kMr) {
            const double* ap = a_pack.data() + (ir / kMr) * kMr * kc;
            const std::size_t rows = std::min(kMr, mc - ir);
            micro_kernel(kc, ap, bp, c + (ic + ir) * ldc + jc + jr, ldc, accumulate, rows,
                         cols);
          }
        }
      }
    }
  }
}

const KernelTable kAvx2Table = {
    Level::kAvx2, dot_avx2, squared_distance_avx2, l1_distance_avx2, axpy_avx2, gemm_abt_avx2,
};

}  // namespace

namespace detail {
const KernelTable* avx2_table() { return &kAvx2Table; }
}  // namespace detail

}  // namespace kpca::simd

#else

namespace kpca::simd::detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace kpca::simd::detail

#endif
