#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "kpca/approx_maps.hpp"
#include "kpca/error.hpp"
#include "kpca/linalg.hpp"
#include "test_support.hpp"

namespace kpca {
namespace {

using testing::random_unit_rows;

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kResource;
}

// Gaussian elimination with partial pivoting, independent of the library's
// eigen solver.
std::vector<double> solve(Matrix a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a(r, c)) > std::fabs(a(p, c))) p = r;
    }
    for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(p, j));
    std::swap(b[c], b[p]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

TEST(Rff, InnerProductsApproachKernel) {
  SeededRng rng(1);
  const Matrix x = random_unit_rows(rng, 30, 8);
  for (const auto& spec : {KernelSpec::gaussian(1.5), KernelSpec::laplacian(0.7)}) {
    SeededRng map_rng(2);
    const RffMap map = fit_rff(spec, 8, 20000, map_rng);
    const Matrix phi = apply_rff(map, x);
    const Matrix approx = multiply_abt(phi, phi);
    const Matrix exact = kernel_matrix(spec, x, x);
    double mean_err = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      for (std::size_t j = 0; j < 30; ++j) mean_err += std::fabs(approx(i, j) - exact(i, j));
    }
    mean_err /= 900.0;
    // Monte Carlo error is O(1/sqrt(M)) ~ 0.01.
    EXPECT_LT(mean_err, 0.02) << spec.name();
  }
}

// Seed-averaged kernel gap over a fixed probe set shrinks as the map grows.
TEST(Convergence, KernelGapNonIncreasingInMapSize) {
  SeededRng rng(11);
  const Matrix train = random_unit_rows(rng, 300, 6);
  const Matrix probes = random_unit_rows(rng, 40, 6);
  const KernelSpec spec = KernelSpec::gaussian(1.0);
  const Matrix exact = kernel_matrix(spec, probes, probes);
  auto gap = [&](const Matrix& phi) {
    const Matrix approx = multiply_abt(phi, phi);
    double s = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) s += std::fabs(approx.data()[i] - exact.data()[i]);
    return s / static_cast<double>(approx.size());
  };
  double prev_rff = 1e300, prev_nys = 1e300;
  for (std::size_t m = 64; m <= 4096; m *= 2) {
    double rff = 0.0, nys = 0.0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      SeededRng map_rng(seed);
      rff += gap(apply_rff(fit_rff(spec, 6, m, map_rng), probes)) / 8.0;
      if (m <= 256) {
        const auto idx = select_landmarks(300, std::nullopt, m, LandmarkSampling::kUniform, map_rng);
        nys += gap(fit_nystrom(spec, train.select_rows(idx)).apply(probes)) / 8.0;
      }
    }
    EXPECT_LE(rff, prev_rff) << "M_r = " << m;
    prev_rff = rff;
    if (m <= 256) {
      EXPECT_LE(nys, prev_nys) << "M_n = " << m;
      prev_nys = nys;
    }
  }
}

TEST(Rff, FrequencyDistributions) {
  SeededRng rng(3);
  const RffMap g = fit_rff(KernelSpec::gaussian(2.0), 4, 20000, rng);
  double s2 = 0.0;
  for (double w : g.omega.data()) s2 += w * w;
  EXPECT_NEAR(s2 / static_cast<double>(g.omega.size()), 4.0, 0.1);  // variance 2 gamma

  const RffMap l = fit_rff(KernelSpec::laplacian(0.5), 4, 20000, rng);
  std::vector<double> abs_w;
  for (double w : l.omega.data()) abs_w.push_back(std::fabs(w));
  std::nth_element(abs_w.begin(), abs_w.begin() + abs_w.size() / 2, abs_w.end());
  EXPECT_NEAR(abs_w[abs_w.size() / 2], 0.5, 0.02);  // median |Cauchy(gamma)| = gamma

  for (double u : g.phase) {
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 2.0 * M_PI);
  }
}

TEST(Rff, BatchMatchesSingleAndIsDeterministic) {
  SeededRng a(4), b(4), data(5);
  const RffMap m1 = fit_rff(KernelSpec::gaussian(1.0), 6, 64, a);
  const RffMap m2 = fit_rff(KernelSpec::gaussian(1.0), 6, 64, b);
  EXPECT_EQ(m1, m2);
  const Matrix x = testing::random_matrix(data, 9, 6);
  const Matrix batch = apply_rff(m1, x);
  for (std::size_t i = 0; i < 9; ++i) {
    const auto single = apply_rff(m1, x.row(i));
    for (std::size_t j = 0; j < 64; ++j) EXPECT_NEAR(batch(i, j), single[j], 1e-13);
  }
  const double bound = std::sqrt(2.0 / 64.0);
  for (double v : batch.data()) EXPECT_LE(std::fabs(v), bound + 1e-15);
}

TEST(Rff, RejectsNonShiftInvariantKernels) {
  SeededRng rng(6);
  EXPECT_EQ(kind_of([&] { fit_rff(KernelSpec::polynomial(1, 2), 3, 8, rng); }),
            ErrorKind::kUnsupportedKernel);
  EXPECT_EQ(kind_of([&] { fit_rff(KernelSpec::cosine(), 3, 8, rng); }), ErrorKind::kUnsupportedKernel);
  const RffMap map = fit_rff(KernelSpec::gaussian(1), 3, 8, rng);
  EXPECT_EQ(kind_of([&] { apply_rff(map, std::vector<double>{1, 2}); }), ErrorKind::kShape);
}

TEST(Energy, HandValuesAndStability) {
  const Matrix logits{{0, 0}, {1000, 1000}, {3, -50}};
  const auto e = energy_scores(logits, 1.0);
  EXPECT_NEAR(e[0], std::log(2.0), 1e-15);
  EXPECT_NEAR(e[1], 1000.0 + std::log(2.0), 1e-12);
  EXPECT_NEAR(e[2], 3.0 + std::log1p(std::exp(-53.0)), 1e-15);
  // T lse(f / T) lies in [max f, max f + T log C].
  for (double t : {0.1, 1.0, 7.0}) {
    const auto et = energy_scores(logits, t);
    EXPECT_GE(et[2], 3.0);
    EXPECT_LE(et[2], 3.0 + t * std::log(2.0) + 1e-12);
  }
}

TEST(Landmarks, EnergySchemesPickExtremesWithIndexTieBreak) {
  const std::vector<double> energy{5, 1, 3, 1, 9, 7};
  SeededRng rng(7);
  EXPECT_EQ(select_landmarks(6, energy, 3, LandmarkSampling::kLowEnergy, rng),
            (std::vector<std::size_t>{1, 3, 2}));
  EXPECT_EQ(select_landmarks(6, energy, 2, LandmarkSampling::kHighEnergy, rng),
            (std::vector<std::size_t>{4, 5}));
  const auto u = select_landmarks(6, std::nullopt, 4, LandmarkSampling::kUniform, rng);
  EXPECT_EQ(std::set<std::size_t>(u.begin(), u.end()).size(), 4u);

  EXPECT_EQ(kind_of([&] { select_landmarks(6, energy, 7, LandmarkSampling::kLowEnergy, rng); }),
            ErrorKind::kParameter);
  EXPECT_EQ(kind_of([&] { select_landmarks(6, energy, 0, LandmarkSampling::kUniform, rng); }),
            ErrorKind::kParameter);
  EXPECT_EQ(kind_of([&] { select_landmarks(6, std::nullopt, 2, LandmarkSampling::kLowEnergy, rng); }),
            ErrorKind::kUsage);
}

TEST(Landmarks, SamplingNames) {
  for (auto s : {LandmarkSampling::kLowEnergy, LandmarkSampling::kHighEnergy, LandmarkSampling::kUniform}) {
    EXPECT_EQ(parse_sampling(to_string(s)), s);
  }
  EXPECT_FALSE(parse_sampling("random"));
}

TEST(Nystrom, ReproducesKernelOnLandmarks) {
  SeededRng rng(8);
  const Matrix l = random_unit_rows(rng, 25, 5);
  const KernelSpec spec = KernelSpec::gaussian(2.0);
  const NystromMap map = fit_nystrom(spec, l);
  ASSERT_EQ(map.output_dim(), 25u);
  const Matrix phi = map.apply(l);
  EXPECT_LE(max_abs_diff(multiply_abt(phi, phi), kernel_matrix(spec, l, l)), 1e-8);
}

TEST(Nystrom, OutOfSampleInnerProductIsKernelRegression) {
  // Phi(z) . Phi(w) = k_z^T K^{-1} k_w for a full-rank landmark kernel.
  SeededRng rng(9);
  const Matrix l = random_unit_rows(rng, 12, 4);
  const Matrix q = random_unit_rows(rng, 5, 4);
  const KernelSpec spec = KernelSpec::laplacian(1.0);
  const NystromMap map = fit_nystrom(spec, l);
  const Matrix phi = map.apply(q);
  const Matrix k = kernel_matrix(spec, l, l);
  const Matrix kq = kernel_matrix(spec, q, l);
  for (std::size_t a = 0; a < 5; ++a) {
    const auto alpha = solve(k, std::vector<double>(kq.row(a).begin(), kq.row(a).end()));
    for (std::size_t b = 0; b < 5; ++b) {
      double ref = 0.0;
      for (std::size_t j = 0; j < 12; ++j) ref += alpha[j] * kq(b, j);
      EXPECT_NEAR(dot(phi.row(a), phi.row(b)), ref, 1e-9);
    }
  }
}

TEST(Nystrom, DropsNullDirectionsAndBatchMatchesSingle) {
  // Linear kernel on points spanning a 2-plane in R^4: rank 2.
  SeededRng rng(10);
  Matrix l(10, 4);
  for (std::size_t i = 0; i < 10; ++i) {
    l(i, 0) = rng.normal();
    l(i, 1) = rng.normal();
  }
  const NystromMap map = fit_nystrom(KernelSpec::linear(), l);
  EXPECT_EQ(map.output_dim(), 2u);
  const Matrix q = testing::random_matrix(rng, 3, 4);
  const Matrix batch = map.apply(q);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto single = map.apply(q.row(i));
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(batch(i, j), single[j], 1e-12);
  }
  EXPECT_EQ(kind_of([] { fit_nystrom(KernelSpec::linear(), Matrix(4, 3)); }), ErrorKind::kDegenerateKernel);
}

}  // namespace
}  // namespace kpca
