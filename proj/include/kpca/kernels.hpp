#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kpca/matrix.hpp"

namespace kpca {

// Serialized codes; do not renumber.
enum class KernelBase : std::uint8_t {
  kGaussian = 0,
  kLaplacian = 1,
  kPolynomial = 2,
  kLinear = 3,
  kCosine = 4,
};

/// A base kernel, optionally composed after the cosine map z -> z / ||z||.
///
///   gaussian    exp(-gamma ||a - b||_2^2)
///   laplacian   exp(-gamma ||a - b||_1)
///   polynomial  (a . b + coef)^degree
///   linear      a . b
///   cosine      a . b / (||a|| ||b||)
struct KernelSpec {
  KernelBase base = KernelBase::kGaussian;
  double gamma = 1.0;
  double coef = 0.0;
  std::uint32_t degree = 1;
  bool cosine_prefix = false;

  static KernelSpec gaussian(double gamma, bool cosine_prefix = false);
  static KernelSpec laplacian(double gamma, bool cosine_prefix = false);
  static KernelSpec polynomial(double coef, std::uint32_t degree, bool cosine_prefix = false);
  static KernelSpec linear(bool cosine_prefix = false);
  static KernelSpec cosine();

  // Parses names such as "cosine-gaussian", "laplacian", "cosine".
  static KernelSpec from_name(std::string_view name);
  std::string name() const;

  bool uses_gamma() const noexcept {
    return base == KernelBase::kGaussian || base == KernelBase::kLaplacian;
  }
  bool shift_invariant() const noexcept { return uses_gamma(); }

  // Same kernel without the cosine prefix, for inputs already on the sphere.
  KernelSpec without_prefix() const;

  // Throws kParameter on gamma <= 0, degree == 0 or cosine-prefixed cosine.
  void validate() const;

  bool operator==(const KernelSpec&) const = default;
};

std::vector<double> cos_map(std::span<const double> z);

/// Normalizes every row; throws RowError(kDegenerateInput) naming the first
/// zero-norm row.
Matrix cos_map_rows(const Matrix& rows);

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b);

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b);

}  // namespace kpca
