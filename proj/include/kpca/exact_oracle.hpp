#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kpca/kernels.hpp"
#include "kpca/linalg.hpp"
#include "kpca/matrix.hpp"

namespace kpca {

/// Largest training set accepted by the exact oracle (cubic cost).
inline constexpr std::size_t kExactOracleMaxRows = 5000;

/// Kernel PCA computed directly on the N x N training kernel matrix.
///
/// `train` is stored in the kernel's input space (after the cosine map when
/// the kernel carries the prefix). `p` is the number of trailing (residual)
/// eigenvectors; the leading N - p span the principal subspace.
struct ExactKpcaModel {
  Matrix train;
  KernelSpec spec;
  EigenDecomposition eig;
  std::size_t p = 0;
  bool centered = false;
  // Row means of K and the grand mean, for centering query kernel vectors.
  std::vector<double> kernel_row_means;
  double kernel_grand_mean = 0.0;

  std::size_t num_train() const noexcept { return train.rows(); }
  std::size_t q() const noexcept { return train.rows() - p; }
};

ExactKpcaModel fit_exact(const Matrix& train, const KernelSpec& spec, std::size_t p, bool centered);

/// || U_p^T k_z ||_2 over the uncentered kernel vector, projected on
/// the trailing p eigenvectors. Requires centered == false.
double exact_error_trailing_form(const ExactKpcaModel& model, std::span<const double> z);

/// Squared residual k(z, z) - sum_{j <= q} (u_j . k_z)^2 / lambda_j (with
/// centered kernel values when the model is centered), clamped at zero, square
/// rooted. Eigenpairs below 1e-10 * lambda_max are skipped.
double exact_error_standard_form(const ExactKpcaModel& model, std::span<const double> z);

std::vector<double> exact_error_standard_form(const ExactKpcaModel& model, const Matrix& rows);

}  // namespace kpca
