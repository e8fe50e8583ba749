#include "kpca/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpca/approx_maps.hpp"
#include "kpca/error.hpp"
#include "kpca/simd.hpp"

namespace kpca {
namespace {

// Query vector in the stored training space.
std::vector<double> prepare(const ExactKpcaModel& model, std::span<const double> z) {
  if (z.size() != model.train.cols()) {
    fail(ErrorKind::kShape, "exact oracle: query length " + std::to_string(z.size()) +
                                ", training dimension " + std::to_string(model.train.cols()));
  }
  if (model.spec.cosine_prefix) return cos_map(z);
  return {z.begin(), z.end()};
}

std::vector<double> kernel_vector(const ExactKpcaModel& model, std::span<const double> z) {
  const KernelSpec base = model.spec.without_prefix();
  std::vector<double> kz(model.num_train());
  for (std::size_t i = 0; i < kz.size(); ++i) kz[i] = kernel_eval(base, z, model.train.row(i));
  return kz;
}

double standard_form_from_kernel(const ExactKpcaModel& model, std::vector<double>& kz, double kzz) {
  const std::size_t n = model.num_train();
  if (model.centered) {
    double kz_mean = 0.0;
    for (double v : kz) kz_mean += v;
    kz_mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      kz[i] = kz[i] - kz_mean - model.kernel_row_means[i] + model.kernel_grand_mean;
    }
    kzz = kzz - 2.0 * kz_mean + model.kernel_grand_mean;
  }
  const auto& values = model.eig.eigenvalues;
  const double top = values.empty() ? 0.0 : values.front();
  double explained = 0.0;
  for (std::size_t j = 0; j < model.q(); ++j) {
    if (!(top > 0.0) || !(values[j] > kEigenRelativeCutoff * top)) break;
    double coord = 0.0;
    for (std::size_t i = 0; i < n; ++i) coord += model.eig.eigenvectors(i, j) * kz[i];
    explained += coord * coord / values[j];
  }
  return std::sqrt(std::max(0.0, kzz - explained));
}

}  // namespace

ExactKpcaModel fit_exact(const Matrix& train, const KernelSpec& spec, std::size_t p, bool centered) {
  spec.validate();
  const std::size_t n = train.rows();
  if (n < 2) fail(ErrorKind::kData, "fit_exact: need at least 2 training rows");
  if (n > kExactOracleMaxRows) {
    fail(ErrorKind::kResource, "fit_exact: " + std::to_string(n) + " training rows exceeds the " +
                                   std::to_string(kExactOracleMaxRows) + "-row oracle cap");
  }
  if (p >= n) {
    fail(ErrorKind::kParameter, "fit_exact: residual count " + std::to_string(p) +
                                    " must be below the training size " + std::to_string(n));
  }
  ExactKpcaModel model;
  model.train = spec.cosine_prefix ? cos_map_rows(train) : train;
  model.spec = spec;
  model.p = p;
  model.centered = centered;

  Matrix k = kernel_matrix(spec.without_prefix(), model.train, model.train);
  model.kernel_row_means.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (double v : k.row(i)) s += v;
    model.kernel_row_means[i] = s / static_cast<double>(n);
  }
  double grand = 0.0;
  for (double v : model.kernel_row_means) grand += v;
  model.kernel_grand_mean = grand / static_cast<double>(n);

  if (centered) {
    // K - 1K/N - K1/N + 1K1/N^2; K is symmetric so row and column means agree.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        k(i, j) += model.kernel_grand_mean - model.kernel_row_means[i] - model.kernel_row_means[j];
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double avg = 0.5 * (k(i, j) + k(j, i));
        k(i, j) = avg;
        k(j, i) = avg;
      }
    }
  }
  model.eig = sym_eigen(k);
  return model;
}

double exact_error_trailing_form(const ExactKpcaModel& model, std::span<const double> z) {
  if (model.centered) {
    fail(ErrorKind::kUsage, "exact_error_trailing_form: model must be fitted uncentered");
  }
  const std::vector<double> x = prepare(model, z);
  const std::vector<double> kz = kernel_vector(model, x);
  const std::size_t n = model.num_train();
  double sum = 0.0;
  for (std::size_t j = model.q(); j < n; ++j) {
    double coord = 0.0;
    for (std::size_t i = 0; i < n; ++i) coord += model.eig.eigenvectors(i, j) * kz[i];
    sum += coord * coord;
  }
  return std::sqrt(sum);
}

double exact_error_standard_form(const ExactKpcaModel& model, std::span<const double> z) {
  const std::vector<double> x = prepare(model, z);
  std::vector<double> kz = kernel_vector(model, x);
  const double kzz = kernel_eval(model.spec.without_prefix(), x, x);
  return standard_form_from_kernel(model, kz, kzz);
}

std::vector<double> exact_error_standard_form(const ExactKpcaModel& model, const Matrix& rows) {
  std::vector<double> out(rows.rows());
  for (std::size_t i = 0; i < rows.rows(); ++i) out[i] = exact_error_standard_form(model, rows.row(i));
  return out;
}

}  // namespace kpca
