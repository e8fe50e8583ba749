#include "kpca/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpca/error.hpp"
#include "kpca/simd.hpp"

namespace kpca {
namespace {

constexpr double kPositiveCutoff = 1e-10;

void check_threshold(const SubspaceOptions& options) {
  if (!(options.evr_threshold > 0.0 && options.evr_threshold <= 1.0)) {
    fail(ErrorKind::kParameter, "explained variance threshold must be in (0, 1], got " +
                                    std::to_string(options.evr_threshold));
  }
}

std::size_t resolve_q(const SubspaceOptions& options, std::span<const double> spectrum,
                      std::size_t dim) {
  if (options.fixed_q) {
    if (*options.fixed_q > dim) {
      fail(ErrorKind::kParameter, "subspace dimension " + std::to_string(*options.fixed_q) +
                                      " exceeds data dimension " + std::to_string(dim));
    }
    return *options.fixed_q;
  }
  return choose_q(spectrum, options.evr_threshold);
}

// Flip so the largest-magnitude entry is positive.
void normalize_sign(Matrix& columns) {
  for (std::size_t c = 0; c < columns.cols(); ++c) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < columns.rows(); ++r) {
      if (std::fabs(columns(r, c)) > best) {
        best = std::fabs(columns(r, c));
        arg = r;
      }
    }
    if (columns(arg, c) < 0.0) {
      for (std::size_t r = 0; r < columns.rows(); ++r) columns(r, c) = -columns(r, c);
    }
  }
}

SubspaceModel from_scatter(std::vector<double> mean, const Matrix& scatter,
                           const SubspaceOptions& options) {
  const std::size_t dim = mean.size();
  EigenDecomposition eig = sym_eigen(scatter);
  SubspaceModel model;
  model.mean = std::move(mean);
  model.evr_threshold = options.evr_threshold;
  model.spectrum = eig.eigenvalues;
  model.q = resolve_q(options, model.spectrum, dim);
  model.projection = eig.eigenvectors.leading_cols(model.q);
  if (options.keep_full_basis) {
    model.residual = Matrix(dim, dim - model.q);
    for (std::size_t r = 0; r < dim; ++r) {
      for (std::size_t c = model.q; c < dim; ++c) model.residual(r, c - model.q) = eig.eigenvectors(r, c);
    }
  }
  return model;
}

SubspaceModel from_gram(std::vector<double> mean, const Matrix& centered,
                        const SubspaceOptions& options) {
  const std::size_t n = centered.rows();
  const std::size_t dim = centered.cols();
  const EigenDecomposition eig = sym_eigen(gram_of_rows(centered));

  SubspaceModel model;
  model.mean = std::move(mean);
  model.evr_threshold = options.evr_threshold;
  model.spectrum.assign(dim, 0.0);
  std::copy(eig.eigenvalues.begin(), eig.eigenvalues.end(), model.spectrum.begin());
  for (double& v : model.spectrum) v = std::max(v, 0.0);
  model.q = resolve_q(options, model.spectrum, dim);

  const double top = model.spectrum.front();
  std::size_t positive = 0;
  while (positive < n && top > 0.0 && model.spectrum[positive] > kPositiveCutoff * top) ++positive;
  if (model.q > positive) {
    fail(ErrorKind::kParameter, "subspace dimension " + std::to_string(model.q) +
                                    " exceeds the rank " + std::to_string(positive) +
                                    " of the training rows");
  }
  // u_j = X^T v_j / sqrt(lambda_j)
  const Matrix vt = eig.eigenvectors.leading_cols(model.q).transposed();
  Matrix ut = multiply_abt(vt, centered.transposed());
  for (std::size_t j = 0; j < model.q; ++j) {
    const double s = 1.0 / std::sqrt(model.spectrum[j]);
    for (double& v : ut.row(j)) v *= s;
  }
  model.projection = ut.transposed();
  normalize_sign(model.projection);
  return model;
}

}  // namespace

std::size_t choose_q(std::span<const double> spectrum, double evr_threshold) {
  if (spectrum.empty()) return 0;
  const double top = spectrum.front();
  if (!(top > 0.0)) return 0;
  std::size_t positive = 0;
  double total = 0.0;
  while (positive < spectrum.size() && spectrum[positive] > kPositiveCutoff * top) {
    total += spectrum[positive];
    ++positive;
  }
  double cumulative = 0.0;
  for (std::size_t q = 1; q <= positive; ++q) {
    cumulative += spectrum[q - 1];
    if (cumulative >= evr_threshold * total) return q;
  }
  return positive;
}

SubspaceModel fit_subspace(const Matrix& rows, const SubspaceOptions& options) {
  check_threshold(options);
  if (rows.rows() < 2) {
    fail(ErrorKind::kData, "fit_subspace: need at least 2 rows, got " + std::to_string(rows.rows()));
  }
  std::vector<double> mean = column_means(rows);
  if (rows.rows() < rows.cols() && !options.keep_full_basis) {
    Matrix centered = rows;
    for (std::size_t i = 0; i < centered.rows(); ++i) {
      auto r = centered.row(i);
      for (std::size_t j = 0; j < r.size(); ++j) r[j] -= mean[j];
    }
    return from_gram(std::move(mean), centered, options);
  }
  const Matrix scatter = covariance(rows, mean);
  return from_scatter(std::move(mean), scatter, options);
}

SubspaceModel fit_subspace(const CovarianceAccumulator& acc, const SubspaceOptions& options) {
  check_threshold(options);
  if (acc.count() < 2) {
    fail(ErrorKind::kData, "fit_subspace: need at least 2 rows, got " + std::to_string(acc.count()));
  }
  return from_scatter(acc.mean(), acc.covariance(), options);
}

double reconstruction_error(const SubspaceModel& model, std::span<const double> v) {
  if (v.size() != model.dim()) {
    fail(ErrorKind::kShape, "reconstruction_error: vector length " + std::to_string(v.size()) +
                                ", model dimension " + std::to_string(model.dim()));
  }
  const std::size_t dim = model.dim();
  std::vector<double> centered(dim);
  for (std::size_t i = 0; i < dim; ++i) centered[i] = v[i] - model.mean[i];
  std::vector<double> coords(model.q, 0.0);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < model.q; ++c) coords[c] += model.projection(r, c) * centered[r];
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    double recon = 0.0;
    for (std::size_t c = 0; c < model.q; ++c) recon += model.projection(r, c) * coords[c];
    const double diff = recon - centered[r];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

std::vector<double> reconstruction_error(const SubspaceModel& model, const Matrix& rows) {
  if (rows.cols() != model.dim()) {
    fail(ErrorKind::kShape, "reconstruction_error: row length " + std::to_string(rows.cols()) +
                                ", model dimension " + std::to_string(model.dim()));
  }
  Matrix centered = rows;
  for (std::size_t i = 0; i < centered.rows(); ++i) {
    auto r = centered.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= model.mean[j];
  }
  std::vector<double> errors(rows.rows());
  if (model.q == 0) {
    for (std::size_t i = 0; i < rows.rows(); ++i) errors[i] = norm2(centered.row(i));
    return errors;
  }
  const Matrix coords = multiply_abt(centered, model.projection.transposed());
  const Matrix recon = multiply_abt(coords, model.projection);
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    errors[i] = std::sqrt(simd::active().squared_distance(recon.row(i).data(),
                                                          centered.row(i).data(), model.dim()));
  }
  return errors;
}

double residual_form_error(const SubspaceModel& model, std::span<const double> v) {
  if (!model.has_residual_basis()) {
    fail(ErrorKind::kUsage, "residual_form_error: model was fitted without the full basis");
  }
  if (v.size() != model.dim()) {
    fail(ErrorKind::kShape, "residual_form_error: vector length " + std::to_string(v.size()) +
                                ", model dimension " + std::to_string(model.dim()));
  }
  double sum = 0.0;
  for (std::size_t c = 0; c < model.residual.cols(); ++c) {
    double coord = 0.0;
    for (std::size_t r = 0; r < model.dim(); ++r) coord += model.residual(r, c) * (v[r] - model.mean[r]);
    sum += coord * coord;
  }
  return std::sqrt(sum);
}

}  // namespace kpca
