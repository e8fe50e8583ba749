#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>

#include "kpca/error.hpp"
#include "kpca/simd.hpp"
#include "test_support.hpp"

namespace kpca {
namespace {

using simd::Level;

std::vector<Level> vector_levels() {
  std::vector<Level> out;
  for (Level l : {Level::kAvx2, Level::kNeon}) {
    if (simd::supported(l)) out.push_back(l);
  }
  return out;
}

// Reordered summation: compare relative to the magnitude of the terms.
double tolerance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] * b[i]) + a[i] * a[i] + b[i] * b[i];
  return 1e-14 * (1.0 + s);
}

TEST(SimdDispatch, ParseAndNames) {
  EXPECT_EQ(simd::parse_level("scalar"), Level::kScalar);
  EXPECT_EQ(simd::parse_level("avx2"), Level::kAvx2);
  EXPECT_EQ(simd::parse_level("neon"), Level::kNeon);
  EXPECT_FALSE(simd::parse_level("sse9"));
  EXPECT_EQ(simd::to_string(Level::kAvx2), "avx2");
  EXPECT_TRUE(simd::supported(Level::kScalar));
}

TEST(SimdDispatch, ActiveHonorsEnvironmentOverride) {
  const char* env = std::getenv("KPCA_SIMD");
  if (env != nullptr && std::string(env) == "scalar") {
    EXPECT_EQ(simd::active().level, Level::kScalar);
  } else {
    EXPECT_EQ(simd::active().level, simd::detect_best());
  }
}

TEST(SimdDispatch, UnsupportedLevelThrows) {
  for (Level l : {Level::kAvx2, Level::kNeon}) {
    if (!simd::supported(l)) {
      EXPECT_THROW(simd::table(l), Error);
    }
  }
}

TEST(SimdDispatch, SetActiveSwitchesAndRestores) {
  const Level before = simd::active().level;
  simd::set_active(Level::kScalar);
  EXPECT_EQ(simd::active().level, Level::kScalar);
  simd::set_active(before);
  EXPECT_EQ(simd::active().level, before);
}

TEST(SimdEquivalence, ReductionsMatchScalar) {
  const auto levels = vector_levels();
  if (levels.empty()) GTEST_SKIP() << "no vector unit on this machine";
  const auto& ref = simd::table(Level::kScalar);
  SeededRng rng(7);
  for (Level level : levels) {
    const auto& t = simd::table(level);
    for (std::size_t n = 0; n <= 67; ++n) {
      const auto a = testing::random_vector(rng, n, 3.0);
      const auto b = testing::random_vector(rng, n, 3.0);
      const double tol = tolerance(a.data(), b.data(), n);
      EXPECT_NEAR(t.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), tol) << n;
      EXPECT_NEAR(t.squared_distance(a.data(), b.data(), n),
                  ref.squared_distance(a.data(), b.data(), n), tol) << n;
      EXPECT_NEAR(t.l1_distance(a.data(), b.data(), n), ref.l1_distance(a.data(), b.data(), n), tol) << n;
    }
  }
}

TEST(SimdEquivalence, AxpyMatchesScalarExactlyUpToFma) {
  const auto levels = vector_levels();
  if (levels.empty()) GTEST_SKIP() << "no vector unit on this machine";
  const auto& ref = simd::table(Level::kScalar);
  SeededRng rng(8);
  for (Level level : levels) {
    for (std::size_t n = 0; n <= 41; ++n) {
      const auto x = testing::random_vector(rng, n);
      auto y1 = testing::random_vector(rng, n);
      auto y2 = y1;
      ref.axpy(-1.75, x.data(), y1.data(), n);
      simd::table(level).axpy(-1.75, x.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y1[i], y2[i], 1e-15 * (1 + std::fabs(y1[i])));
    }
  }
}

TEST(SimdEquivalence, GemmMatchesScalarOverEdgeShapes) {
  const auto levels = vector_levels();
  if (levels.empty()) GTEST_SKIP() << "no vector unit on this machine";
  const auto& ref = simd::table(Level::kScalar);
  SeededRng rng(9);
  const std::size_t shapes[][3] = {{1, 1, 1},   {5, 7, 3},     {6, 8, 256},  {7, 9, 257},
                                   {13, 17, 31}, {96, 64, 300}, {101, 203, 97}, {200, 130, 520}};
  for (Level level : levels) {
    for (const auto& s : shapes) {
      const std::size_t m = s[0], n = s[1], k = s[2];
      // Padded leading dimensions exercise the stride arguments.
      const Matrix a = testing::random_matrix(rng, m, k + 3);
      const Matrix b = testing::random_matrix(rng, n, k + 5);
      Matrix c1(m, n + 2, 99.0), c2(m, n + 2, 99.0);
      ref.gemm_abt(a.data().data(), k + 3, b.data().data(), k + 5, c1.data().data(), n + 2, m, n, k);
      simd::table(level).gemm_abt(a.data().data(), k + 3, b.data().data(), k + 5, c2.data().data(),
                                  n + 2, m, n, k);
      EXPECT_LE(max_abs_diff(c1, c2), 1e-12 * static_cast<double>(k)) << m << "x" << n << "x" << k;
      // Columns past n are untouched.
      for (std::size_t i = 0; i < m; ++i) EXPECT_EQ(c2(i, n), 99.0);
    }
  }
}

TEST(SimdPerformance, VectorGemmIsFasterThanScalar) {
  const auto levels = vector_levels();
  if (levels.empty()) GTEST_SKIP() << "no vector unit on this machine";
  SeededRng rng(10);
  const std::size_t n = 384;
  const Matrix a = testing::random_matrix(rng, n, n);
  const Matrix b = testing::random_matrix(rng, n, n);
  Matrix c(n, n);
  auto time = [&](const simd::KernelTable& t) {
    const auto start = std::chrono::steady_clock::now();
    t.gemm_abt(a.data().data(), n, b.data().data(), n, c.data().data(), n, n, n, n);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const double scalar = time(simd::table(Level::kScalar));
  const double vec = time(simd::table(levels.front()));
  RecordProperty("scalar_seconds", std::to_string(scalar));
  RecordProperty("vector_seconds", std::to_string(vec));
  EXPECT_LT(vec, scalar);
}

}  // namespace
}  // namespace kpca
