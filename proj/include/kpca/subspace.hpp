#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kpca/linalg.hpp"
#include "kpca/matrix.hpp"

namespace kpca {

/// Principal subspace of a set of rows.
///
/// `projection` holds the leading q eigenvectors of the unnormalized scatter
/// matrix as columns. `spectrum` is the full descending eigenvalue sequence
/// (length = dim). `residual` holds the trailing dim - q eigenvectors and is
/// only populated when the model was fitted with keep_full_basis.
struct SubspaceModel {
  std::vector<double> mean;
  Matrix projection;
  std::vector<double> spectrum;
  std::size_t q = 0;
  double evr_threshold = 1.0;
  Matrix residual;

  std::size_t dim() const noexcept { return mean.size(); }
  bool has_residual_basis() const noexcept { return residual.rows() == dim() && dim() > 0; }

  bool operator==(const SubspaceModel&) const = default;
};

struct SubspaceOptions {
  double evr_threshold = 0.9;
  // Overrides the explained-variance rule.
  std::optional<std::size_t> fixed_q;
  // Forces the dim x dim eigendecomposition and keeps the trailing basis.
  bool keep_full_basis = false;
};

/// Smallest q with cumulative share >= threshold over eigenvalues above
/// 1e-10 * lambda_max.
std::size_t choose_q(std::span<const double> spectrum, double evr_threshold);

/// Fits on rows. When rows < cols (and the full basis is not requested) the
/// eigenproblem is solved on the rows x rows Gram matrix instead of the
/// covariance; both give the same nonzero spectrum and leading directions.
SubspaceModel fit_subspace(const Matrix& rows, const SubspaceOptions& options = {});

/// Fits from a streamed scatter accumulator.
SubspaceModel fit_subspace(const CovarianceAccumulator& acc, const SubspaceOptions& options = {});

/// || U U^T (v - mu) - (v - mu) ||_2
double reconstruction_error(const SubspaceModel& model, std::span<const double> v);
std::vector<double> reconstruction_error(const SubspaceModel& model, const Matrix& rows);

/// || U_res^T (v - mu) ||_2; requires the residual basis.
double residual_form_error(const SubspaceModel& model, std::span<const double> v);

}  // namespace kpca
