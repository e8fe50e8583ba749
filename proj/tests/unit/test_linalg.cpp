#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kpca/error.hpp"
#include "kpca/linalg.hpp"
#include "test_support.hpp"

namespace kpca {
namespace {

using testing::naive_product;
using testing::random_matrix;
using testing::random_symmetric;

double orthonormality_error(const Matrix& v) {
  return max_abs_diff(naive_product(v.transposed(), v), Matrix::identity(v.cols()));
}

double reconstruction_error(const Matrix& a, const EigenDecomposition& e) {
  Matrix scaled = e.eigenvectors;
  for (std::size_t i = 0; i < scaled.rows(); ++i) {
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= e.eigenvalues[j];
  }
  return max_abs_diff(naive_product(scaled, e.eigenvectors.transposed()), a);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kResource;
}

TEST(SymEigen, IdentityHasUnitSpectrum) {
  const auto e = sym_eigen(Matrix::identity(3));
  for (double v : e.eigenvalues) EXPECT_NEAR(v, 1.0, 1e-15);
  EXPECT_LE(orthonormality_error(e.eigenvectors), 1e-12);
}

TEST(SymEigen, DiagonalGivesAxisVectors) {
  const auto e = sym_eigen(Matrix{{1, 0}, {0, 4}});
  EXPECT_DOUBLE_EQ(e.eigenvalues[0], 4.0);
  EXPECT_DOUBLE_EQ(e.eigenvalues[1], 1.0);
  EXPECT_NEAR(std::fabs(e.eigenvectors(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::fabs(e.eigenvectors(0, 1)), 1.0, 1e-15);
}

TEST(SymEigen, TwoByTwoCharacteristicPolynomial) {
  // det([[2-l, 1], [1, 2-l]]) = (l - 3)(l - 1)
  const auto e = sym_eigen(Matrix{{2, 1}, {1, 2}});
  EXPECT_NEAR(e.eigenvalues[0], 3.0, 1e-14);
  EXPECT_NEAR(e.eigenvalues[1], 1.0, 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(e.eigenvectors(0, 0), r, 1e-14);
  EXPECT_NEAR(e.eigenvectors(1, 0), r, 1e-14);
}

TEST(SymEigen, RandomEightByEightInvariants) {
  SeededRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix a = random_symmetric(rng, 8);
    const auto e = sym_eigen(a);
    EXPECT_TRUE(std::is_sorted(e.eigenvalues.rbegin(), e.eigenvalues.rend()));
    EXPECT_LE(orthonormality_error(e.eigenvectors), 1e-8);
    EXPECT_LE(reconstruction_error(a, e), 1e-6 * std::max(1.0, max_abs(a)));
  }
}

TEST(SymEigen, SignConventionLargestEntryPositive) {
  SeededRng rng(12);
  const auto e = sym_eigen(random_symmetric(rng, 10));
  for (std::size_t c = 0; c < 10; ++c) {
    double best = 0.0;
    for (std::size_t r = 0; r < 10; ++r) {
      if (std::fabs(e.eigenvectors(r, c)) > std::fabs(best)) best = e.eigenvectors(r, c);
    }
    EXPECT_GT(best, 0.0);
  }
}

TEST(SymEigen, JacobiAndTridiagonalBackendsAgree) {
  SeededRng rng(13);
  for (std::size_t n : {5u, 40u, 120u}) {
    const Matrix a = random_symmetric(rng, n);
    const auto j = sym_eigen_jacobi(a);
    const auto t = sym_eigen_tridiagonal(a);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(j.eigenvalues[i], t.eigenvalues[i], 1e-10);
    // Random spectra are simple, so vectors agree once signs are normalized.
    EXPECT_LE(max_abs_diff(j.eigenvectors, t.eigenvectors), 1e-7) << "n = " << n;
  }
}

TEST(SymEigen, LargeMatrixUsesTridiagonalAndStaysAccurate) {
  SeededRng rng(14);
  const Matrix a = random_symmetric(rng, kJacobiMaxOrder + 72);
  const auto e = sym_eigen(a);
  EXPECT_LE(orthonormality_error(e.eigenvectors), 1e-8);
  EXPECT_LE(reconstruction_error(a, e), 1e-6 * std::max(1.0, max_abs(a)));
}

TEST(SymEigen, Deterministic) {
  SeededRng rng(15);
  const Matrix a = random_symmetric(rng, 30);
  const auto x = sym_eigen(a);
  const auto y = sym_eigen(a);
  EXPECT_EQ(x.eigenvalues, y.eigenvalues);
  EXPECT_EQ(x.eigenvectors, y.eigenvectors);
}

TEST(SymEigen, RejectsBadInput) {
  EXPECT_EQ(kind_of([] { sym_eigen(Matrix(2, 3)); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([] { sym_eigen(Matrix{{1, 2}, {2.1, 1}}); }), ErrorKind::kShape);
  EXPECT_EQ(kind_of([] { sym_eigen(Matrix{{1, NAN}, {NAN, 1}}); }), ErrorKind::kData);
  // within the 1e-9 symmetry tolerance
  EXPECT_NO_THROW(sym_eigen(Matrix{{1, 2}, {2 + 1e-12, 1}}));
}

TEST(Covariance, HandDerivedExamples) {
  const Matrix same{{1, 2}, {1, 2}};
  const double mean_same[] = {1, 2};
  EXPECT_EQ(max_abs(covariance(same, mean_same)), 0.0);

  const Matrix x{{1, 0}, {-1, 0}};
  const double zero[] = {0, 0};
  EXPECT_EQ(covariance(x, zero), (Matrix{{2, 0}, {0, 0}}));
}

TEST(Covariance, MatchesOuterProductSumAndIsPsd) {
  SeededRng rng(21);
  const Matrix x = random_matrix(rng, 50, 7);
  const auto mean = column_means(x);
  const Matrix c = covariance(x, mean);
  Matrix ref(7, 7);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t a = 0; a < 7; ++a) {
      for (std::size_t b = 0; b < 7; ++b) ref(a, b) += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
    }
  }
  EXPECT_LE(max_abs_diff(c, ref), 1e-11);
  EXPECT_EQ(c, c.transposed());
  for (double v : sym_eigen(c).eigenvalues) EXPECT_GE(v, -1e-10);
}

TEST(Covariance, InvariantUnderRowPermutation) {
  SeededRng rng(22);
  const Matrix x = random_matrix(rng, 40, 5);
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 7, perm.end());
  const auto mean = column_means(x);
  EXPECT_LE(max_abs_diff(covariance(x, mean), covariance(x.select_rows(perm), mean)), 1e-12);
}

TEST(Covariance, MeanLengthMismatch) {
  const double mean[] = {0, 0, 0};
  EXPECT_EQ(kind_of([&] { covariance(Matrix(2, 2), mean); }), ErrorKind::kShape);
}

TEST(CovarianceAccumulator, StreamedEqualsDirect) {
  SeededRng rng(23);
  Matrix x = random_matrix(rng, 301, 9);
  for (double& v : x.data()) v += 50.0;  // offset stresses the shift
  CovarianceAccumulator acc(9);
  for (std::size_t first = 0; first < x.rows(); first += 64) {
    acc.add(x.slice_rows(first, std::min<std::size_t>(64, x.rows() - first)));
  }
  const auto mean = column_means(x);
  const auto streamed_mean = acc.mean();
  for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(streamed_mean[j], mean[j], 1e-12);
  EXPECT_LE(max_abs_diff(acc.covariance(), covariance(x, mean)), 1e-9);
  EXPECT_EQ(acc.count(), 301u);
  EXPECT_THROW(acc.add(Matrix(2, 3)), Error);
}

TEST(PairwiseSqDist, HandExamples) {
  EXPECT_EQ(pairwise_sq_dist(Matrix{{1, 2}}, Matrix{{1, 2}}), (Matrix{{0}}));
  EXPECT_EQ(pairwise_sq_dist(Matrix{{0, 0}}, Matrix{{3, 4}}), (Matrix{{25}}));
  EXPECT_EQ(kind_of([] { pairwise_sq_dist(Matrix(1, 2), Matrix(1, 3)); }), ErrorKind::kShape);
}

TEST(PairwiseSqDist, MatchesPerPairLoop) {
  SeededRng rng(31);
  const Matrix a = random_matrix(rng, 5, 3);
  const Matrix b = random_matrix(rng, 4, 3);
  const Matrix d = pairwise_sq_dist(a, b);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += (a(i, k) - b(j, k)) * (a(i, k) - b(j, k));
      EXPECT_NEAR(d(i, j), s, 1e-10);
    }
  }
}

TEST(PairwiseSqDist, SelfDistanceSymmetricZeroDiagonal) {
  SeededRng rng(32);
  const Matrix a = random_matrix(rng, 12, 6);
  const Matrix d = pairwise_sq_dist(a, a);
  for (std::size_t i = 0; i < 12; ++i) {
    EXPECT_EQ(d(i, i), 0.0);
    for (std::size_t j = 0; j < 12; ++j) {
      EXPECT_EQ(d(i, j), d(j, i));
      EXPECT_GE(d(i, j), 0.0);
    }
  }
}

TEST(Products, GramAndMultiplyMatchNaive) {
  SeededRng rng(41);
  for (auto [r, c] : {std::pair{3, 2}, {50, 17}, {230, 61}, {70, 400}}) {
    const Matrix x = random_matrix(rng, r, c);
    EXPECT_LE(max_abs_diff(gram_of_rows(x), naive_product(x, x.transposed())), 1e-10);
    EXPECT_LE(max_abs_diff(gram_of_columns(x), naive_product(x.transposed(), x)), 1e-10);
    const Matrix y = random_matrix(rng, 13, c);
    EXPECT_LE(max_abs_diff(multiply_abt(x, y), naive_product(x, y.transposed())), 1e-10);
  }
  EXPECT_THROW(multiply_abt(Matrix(2, 3), Matrix(2, 4)), Error);
}

TEST(Vectors, DotAndNorm) {
  const double a[] = {3, 4};
  const double b[] = {1, 2};
  EXPECT_EQ(dot(a, b), 11.0);
  EXPECT_EQ(norm2(a), 5.0);
  const double c[] = {1};
  EXPECT_THROW(dot(a, c), Error);
}

TEST(ColumnMeans, Basic) {
  const auto m = column_means(Matrix{{1, 2}, {3, 6}});
  EXPECT_EQ(m, (std::vector<double>{2, 4}));
  EXPECT_THROW(column_means(Matrix{}), Error);
}

}  // namespace
}  // namespace kpca
