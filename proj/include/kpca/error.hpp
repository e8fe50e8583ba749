#pragma once

#include <stdexcept>
#include <string>

namespace kpca {

// Error categories surfaced by every module. The CLI maps them to exit codes.
enum class ErrorKind {
  kShape,
  kConvergence,
  kFormat,
  kData,
  kLength,
  kIo,
  kUsage,
  kParameter,
  kUnsupportedKernel,
  kDegenerateInput,
  kDegenerateKernel,
  kResource,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised for a single query row that cannot be scored (e.g. zero norm under
// the cosine map). Carries the offending row so callers can skip or report.
class RowError : public Error {
 public:
  RowError(ErrorKind kind, std::size_t row, const std::string& message)
      : Error(kind, message), row_(row) {}

  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace kpca
