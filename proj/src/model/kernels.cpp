#include "kpca/kernels.hpp"

#include <cmath>

#include "kpca/error.hpp"
#include "kpca/simd.hpp"

namespace kpca {
namespace {

double int_power(double x, std::uint32_t n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1U) result *= x;
    x *= x;
    n >>= 1U;
  }
  return result;
}

// Kernel on inputs already past the cosine prefix (if any).
double eval_base(const KernelSpec& spec, const double* a, const double* b, std::size_t n,
                 const simd::KernelTable& k) {
  switch (spec.base) {
    case KernelBase::kGaussian: return std::exp(-spec.gamma * k.squared_distance(a, b, n));
    case KernelBase::kLaplacian: return std::exp(-spec.gamma * k.l1_distance(a, b, n));
    case KernelBase::kPolynomial: return int_power(k.dot(a, b, n) + spec.coef, spec.degree);
    case KernelBase::kLinear: return k.dot(a, b, n);
    case KernelBase::kCosine: {
      const double na = std::sqrt(k.dot(a, a, n));
      const double nb = std::sqrt(k.dot(b, b, n));
      if (na == 0.0 || nb == 0.0) fail(ErrorKind::kDegenerateInput, "cosine kernel: zero vector");
      return k.dot(a, b, n) / (na * nb);
    }
  }
  fail(ErrorKind::kParameter, "unknown kernel base");
}

}  // namespace

KernelSpec KernelSpec::gaussian(double gamma, bool cosine_prefix) {
  return {KernelBase::kGaussian, gamma, 0.0, 1, cosine_prefix};
}
KernelSpec KernelSpec::laplacian(double gamma, bool cosine_prefix) {
  return {KernelBase::kLaplacian, gamma, 0.0, 1, cosine_prefix};
}
KernelSpec KernelSpec::polynomial(double coef, std::uint32_t degree, bool cosine_prefix) {
  return {KernelBase::kPolynomial, 1.0, coef, degree, cosine_prefix};
}
KernelSpec KernelSpec::linear(bool cosine_prefix) {
  return {KernelBase::kLinear, 1.0, 0.0, 1, cosine_prefix};
}
KernelSpec KernelSpec::cosine() { return {KernelBase::kCosine, 1.0, 0.0, 1, false}; }

KernelSpec KernelSpec::from_name(std::string_view name) {
  KernelSpec spec;
  std::string_view base = name;
  constexpr std::string_view kPrefix = "cosine-";
  if (base.starts_with(kPrefix)) {
    spec.cosine_prefix = true;
    base.remove_prefix(kPrefix.size());
  }
  if (base == "gaussian") {
    spec.base = KernelBase::kGaussian;
  } else if (base == "laplacian") {
    spec.base = KernelBase::kLaplacian;
  } else if (base == "polynomial") {
    spec.base = KernelBase::kPolynomial;
    spec.coef = 1.0;
    spec.degree = 2;
  } else if (base == "linear") {
    spec.base = KernelBase::kLinear;
  } else if (base == "cosine" && !spec.cosine_prefix) {
    spec.base = KernelBase::kCosine;
  } else {
    fail(ErrorKind::kUsage, "unknown kernel '" + std::string(name) + "'");
  }
  return spec;
}

std::string KernelSpec::name() const {
  std::string base_name;
  switch (base) {
    case KernelBase::kGaussian: base_name = "gaussian"; break;
    case KernelBase::kLaplacian: base_name = "laplacian"; break;
    case KernelBase::kPolynomial: base_name = "polynomial"; break;
    case KernelBase::kLinear: base_name = "linear"; break;
    case KernelBase::kCosine: base_name = "cosine"; break;
  }
  return cosine_prefix ? "cosine-" + base_name : base_name;
}

KernelSpec KernelSpec::without_prefix() const {
  KernelSpec out = *this;
  out.cosine_prefix = false;
  return out;
}

void KernelSpec::validate() const {
  if (uses_gamma() && !(gamma > 0.0 && std::isfinite(gamma))) {
    fail(ErrorKind::kParameter, "kernel gamma must be positive, got " + std::to_string(gamma));
  }
  if (base == KernelBase::kPolynomial && degree == 0) {
    fail(ErrorKind::kParameter, "polynomial kernel degree must be >= 1");
  }
  if (base == KernelBase::kCosine && cosine_prefix) {
    fail(ErrorKind::kParameter, "cosine kernel with cosine prefix is redundant");
  }
}

std::vector<double> cos_map(std::span<const double> z) {
  const auto& k = simd::active();
  const double norm = std::sqrt(k.dot(z.data(), z.data(), z.size()));
  if (!(norm > 0.0)) fail(ErrorKind::kDegenerateInput, "cos_map: zero vector has no direction");
  std::vector<double> out(z.begin(), z.end());
  const double inv = 1.0 / norm;
  for (double& v : out) v *= inv;
  return out;
}

Matrix cos_map_rows(const Matrix& rows) {
  Matrix out = rows;
  const auto& k = simd::active();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    const double norm = std::sqrt(k.dot(r.data(), r.data(), r.size()));
    if (!(norm > 0.0)) {
      throw RowError(ErrorKind::kDegenerateInput, i,
                     "row " + std::to_string(i) + ": zero vector has no direction");
    }
    const double inv = 1.0 / norm;
    for (double& v : r) v *= inv;
  }
  return out;
}

double kernel_eval(const KernelSpec& spec, std::span<const double> a, std::span<const double> b) {
  spec.validate();
  if (a.size() != b.size()) {
    fail(ErrorKind::kShape, "kernel_eval: dimension mismatch " + std::to_string(a.size()) +
                                " vs " + std::to_string(b.size()));
  }
  const auto& k = simd::active();
  if (spec.cosine_prefix) {
    const auto ca = cos_map(a);
    const auto cb = cos_map(b);
    return eval_base(spec, ca.data(), cb.data(), ca.size(), k);
  }
  return eval_base(spec, a.data(), b.data(), a.size(), k);
}

Matrix kernel_matrix(const KernelSpec& spec, const Matrix& a, const Matrix& b) {
  spec.validate();
  if (a.cols() != b.cols()) {
    fail(ErrorKind::kShape, "kernel_matrix: dimension mismatch " + std::to_string(a.cols()) +
                                " vs " + std::to_string(b.cols()));
  }
  if (spec.cosine_prefix) {
    return kernel_matrix(spec.without_prefix(), cos_map_rows(a), cos_map_rows(b));
  }
  const auto& k = simd::active();
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ai = a.row(i).data();
    double* dst = out.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      dst[j] = eval_base(spec, ai, b.row(j).data(), a.cols(), k);
    }
  }
  return out;
}

}  // namespace kpca
