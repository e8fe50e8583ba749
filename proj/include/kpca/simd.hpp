#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and
// vectorized variants (AVX2+FMA on x86-64, NEON on AArch64). The active table
// is chosen once at runtime from the CPU features; KPCA_SIMD=scalar|avx2|neon
// in the environment overrides the choice.

#include <cstddef>
#include <optional>
#include <string_view>

namespace kpca::simd {

enum class Level { kScalar, kAvx2, kNeon };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view name);

struct KernelTable {
  Level level;

  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*squared_distance)(const double* a, const double* b, std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C (m x n) = A (m x k) * B^T, B stored as (n x k). Leading dimensions are
  // row strides. C is overwritten.
  void (*gemm_abt)(const double* a, std::size_t lda, const double* b, std::size_t ldb,
                   double* c, std::size_t ldc, std::size_t m, std::size_t n,
                   std::size_t k);
};

// Whether the variant was compiled in and the running CPU can execute it.
bool supported(Level level);

// Table for a specific level; throws kpca::Error if unsupported.
const KernelTable& table(Level level);

// Currently active table.
const KernelTable& active();

// Pins the active level for the rest of the process (tests, benchmarks).
void set_active(Level level);

Level detect_best();

namespace detail {
extern const KernelTable kScalarTable;
const KernelTable* avx2_table();
const KernelTable* neon_table();
}  // namespace detail

}  // namespace kpca::simd
