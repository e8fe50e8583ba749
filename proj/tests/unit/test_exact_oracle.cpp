#include <gtest/gtest.h>

#include <cmath>

#include "kpca/error.hpp"
#include "kpca/exact_oracle.hpp"
#include "kpca/subspace.hpp"
#include "test_support.hpp"

namespace kpca {
namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kResource;
}

// Explicit feature map of (a . b)^2 in R^2.
Matrix quadratic_features(const Matrix& x) {
  Matrix out(x.rows(), 3);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    out(i, 0) = x(i, 0) * x(i, 0);
    out(i, 1) = std::sqrt(2.0) * x(i, 0) * x(i, 1);
    out(i, 2) = x(i, 1) * x(i, 1);
  }
  return out;
}

TEST(ExactOracle, CenteredMatchesPcaInExplicitFeatureSpace) {
  SeededRng rng(1);
  const Matrix x = testing::random_matrix(rng, 25, 2);
  const Matrix probes = testing::random_matrix(rng, 8, 2);
  const Matrix phi = quadratic_features(x);
  const Matrix phi_probes = quadratic_features(probes);
  for (std::size_t q : {1u, 2u}) {
    const auto exact = fit_exact(x, KernelSpec::polynomial(0.0, 2), x.rows() - q, true);
    const auto pca = fit_subspace(phi, {.fixed_q = q});
    for (std::size_t i = 0; i < probes.rows(); ++i) {
      EXPECT_NEAR(exact_error_standard_form(exact, probes.row(i)),
                  reconstruction_error(pca, phi_probes.row(i)), 1e-7)
          << "q = " << q;
    }
  }
}

TEST(ExactOracle, LinearKernelMatchesPca) {
  SeededRng rng(2);
  const Matrix x = testing::random_matrix(rng, 30, 5);
  const auto exact = fit_exact(x, KernelSpec::linear(), 27, true);
  const auto pca = fit_subspace(x, {.fixed_q = 3});
  for (int t = 0; t < 6; ++t) {
    const auto v = testing::random_vector(rng, 5);
    EXPECT_NEAR(exact_error_standard_form(exact, v), reconstruction_error(pca, v), 1e-8);
  }
}

TEST(ExactOracle, FullSubspaceReconstructsTrainingRows) {
  SeededRng rng(3);
  const Matrix x = testing::random_unit_rows(rng, 40, 6);
  const auto model = fit_exact(x, KernelSpec::gaussian(1.0, true), 0, true);
  const auto err = exact_error_standard_form(model, x);
  for (double e : err) EXPECT_LT(e, 1e-5);
  // Held-out points of a Gaussian kernel are never fully explained.
  const auto probe = testing::random_vector(rng, 6);
  EXPECT_GT(exact_error_standard_form(model, probe), 1e-3);
}

TEST(ExactOracle, TrailingFormOnTrainingRows) {
  // k_{x_i} = K e_i, so U_p^T k = (lambda_j u_j[i]) over the trailing j.
  SeededRng rng(4);
  const Matrix x = testing::random_unit_rows(rng, 20, 4);
  const auto model = fit_exact(x, KernelSpec::laplacian(0.5), 5, false);
  for (std::size_t i = 0; i < 20; ++i) {
    double ref = 0.0;
    for (std::size_t j = model.q(); j < 20; ++j) {
      const double c = model.eig.eigenvalues[j] * model.eig.eigenvectors(i, j);
      ref += c * c;
    }
    EXPECT_NEAR(exact_error_trailing_form(model, x.row(i)), std::sqrt(ref), 1e-10);
  }
  const auto centered = fit_exact(x, KernelSpec::laplacian(0.5), 5, true);
  EXPECT_EQ(kind_of([&] { exact_error_trailing_form(centered, x.row(0)); }), ErrorKind::kUsage);
}

TEST(ExactOracle, CosinePrefixAppliedToQueries) {
  SeededRng rng(5);
  const Matrix x = testing::random_matrix(rng, 15, 3);
  const auto model = fit_exact(x, KernelSpec::gaussian(2.0, true), 10, true);
  auto v = testing::random_vector(rng, 3);
  const double e1 = exact_error_standard_form(model, v);
  for (double& c : v) c *= 5.0;
  EXPECT_NEAR(exact_error_standard_form(model, v), e1, 1e-12);
}

TEST(ExactOracle, Errors) {
  EXPECT_EQ(kind_of([] { fit_exact(Matrix(1, 2, 1.0), KernelSpec::linear(), 0, true); }), ErrorKind::kData);
  EXPECT_EQ(kind_of([] { fit_exact(Matrix(3, 2, 1.0), KernelSpec::linear(), 3, true); }), ErrorKind::kParameter);
  EXPECT_EQ(kind_of([] { fit_exact(Matrix(kExactOracleMaxRows + 1, 1, 1.0), KernelSpec::linear(), 0, true); }),
            ErrorKind::kResource);
  EXPECT_EQ(kind_of([] { fit_exact(Matrix(3, 2, 1.0), KernelSpec::gaussian(-1.0), 0, true); }),
            ErrorKind::kParameter);
  const auto model = fit_exact(Matrix{{1, 0}, {0, 1}, {1, 1}}, KernelSpec::linear(), 1, true);
  const std::vector<double> bad{1, 2, 3};
  EXPECT_EQ(kind_of([&] { exact_error_standard_form(model, bad); }), ErrorKind::kShape);
}

}  // namespace
}  // namespace kpca
