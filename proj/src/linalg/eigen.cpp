#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "kpca/error.hpp"
#include "kpca/linalg.hpp"

namespace kpca {
namespace {

constexpr double kSymmetryTolerance = 1e-9;
constexpr int kMaxSweeps = 100;

void check_symmetric(const Matrix& a) {
  if (a.rows() != a.cols()) {
    fail(ErrorKind::kShape, "sym_eigen: matrix is " + std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + ", expected square");
  }
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double x = a(i, j);
      const double y = a(j, i);
      if (!std::isfinite(x) || !std::isfinite(y)) {
        fail(ErrorKind::kData, "sym_eigen: non-finite entry at (" + std::to_string(i) + ", " +
                                   std::to_string(j) + ")");
      }
      if (std::fabs(x - y) > kSymmetryTolerance) {
        fail(ErrorKind::kShape, "sym_eigen: matrix is not symmetric at (" + std::to_string(i) +
                                    ", " + std::to_string(j) + ")");
      }
    }
    if (!std::isfinite(a(i, i))) {
      fail(ErrorKind::kData, "sym_eigen: non-finite diagonal entry " + std::to_string(i));
    }
  }
}

// Sort descending (stable on ties by original column) and flip each column so
// its largest-magnitude entry is positive.
EigenDecomposition finalize(std::vector<double> values, const Matrix& vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Matrix(vectors.rows(), n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    out.eigenvalues[c] = values[src];
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
      const double m = std::fabs(vectors(r, src));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    const double sign = vectors(arg, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r) out.eigenvectors(r, c) = sign * vectors(r, src);
  }
  return out;
}

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

double frobenius_norm(const Matrix& a) {
  double sum = 0.0;
  for (double v : a.data()) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace

EigenDecomposition sym_eigen_jacobi(const Matrix& input) {
  check_symmetric(input);
  const std::size_t n = input.rows();
  Matrix a = input;
  // Symmetrize exactly so rotations act on a truly symmetric matrix.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      const double avg = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = avg;
      a(j, i) = avg;
    }
  }
  Matrix v = Matrix::identity(n);
  const double threshold = 1e-12 * frobenius_norm(a);

  double off = off_diagonal_norm(a);
  int sweep = 0;
  while (off > threshold) {
    if (sweep == kMaxSweeps) {
      fail(ErrorKind::kConvergence, "sym_eigen_jacobi: no convergence after " +
                                        std::to_string(kMaxSweeps) +
                                        " sweeps, off-diagonal residual " + std::to_string(off));
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++sweep;
    off = off_diagonal_norm(a);
  }

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = a(i, i);
  return finalize(std::move(values), v);
}

EigenDecomposition sym_eigen_tridiagonal(const Matrix& input) {
  check_symmetric(input);
  const std::size_t n = input.rows();
  if (n == 0) return {};
  Matrix a = input;
  std::vector<double> w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                                         a.data().data(), static_cast<lapack_int>(n), w.data());
  if (info > 0) {
    fail(ErrorKind::kConvergence,
         "sym_eigen: dsyevd failed to converge (" + std::to_string(info) +
             " off-diagonal elements did not reach zero)");
  }
  if (info < 0) fail(ErrorKind::kParameter, "sym_eigen: dsyevd rejected argument " + std::to_string(-info));
  return finalize(std::move(w), a);
}

EigenDecomposition sym_eigen(const Matrix& a) {
  if (a.rows() <= kJacobiMaxOrder) return sym_eigen_jacobi(a);
  return sym_eigen_tridiagonal(a);
}

}  // namespace kpca
