#include "kpca/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kpca/error.hpp"

namespace kpca {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kConvergence: return "convergence error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kData: return "data error";
    case ErrorKind::kLength: return "length error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kUsage: return "usage error";
    case ErrorKind::kParameter: return "parameter error";
    case ErrorKind::kUnsupportedKernel: return "unsupported kernel";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kDegenerateKernel: return "degenerate kernel";
    case ErrorKind::kResource: return "resource error";
  }
  return "error";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorKind::kShape, "matrix data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) fail(ErrorKind::kShape, "ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  constexpr std::size_t kBlock = 32;
  for (std::size_t i0 = 0; i0 < rows_; i0 += kBlock) {
    const std::size_t i1 = std::min(rows_, i0 + kBlock);
    for (std::size_t j0 = 0; j0 < cols_; j0 += kBlock) {
      const std::size_t j1 = std::min(cols_, j0 + kBlock);
      for (std::size_t i = i0; i < i1; ++i) {
        for (std::size_t j = j0; j < j1; ++j) t.data_[j * rows_ + i] = data_[i * cols_ + j];
      }
    }
  }
  return t;
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) fail(ErrorKind::kShape, "row slice out of range");
  std::vector<double> out(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_));
  return Matrix(count, cols_, std::move(out));
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    if (indices[r] >= rows_) fail(ErrorKind::kShape, "row index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(indices[r] * cols_), cols_,
                out.row(r).begin());
  }
  return out;
}

Matrix Matrix::leading_cols(std::size_t count) const {
  if (count > cols_) fail(ErrorKind::kShape, "column count out of range");
  Matrix out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_), count, out.row(i).begin());
  }
  return out;
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::fabs(v));
  return best;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::kShape, "max_abs_diff: shape mismatch");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    best = std::max(best, std::fabs(a.data()[i] - b.data()[i]));
  }
  return best;
}

}  // namespace kpca
