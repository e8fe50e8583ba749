#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace kpca {

/// Counter-based random source.
///
/// Draw n is a pure function of (seed, n): a SplitMix64 finalizer applied to
/// seed_key + n * golden_gamma. Distributions are built from explicit
/// procedures (Box-Muller, tan of a scaled uniform, partial Fisher-Yates) so the
/// sequence does not depend on the standard library implementation.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t counter = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64();
  // [0, 1), 53-bit resolution.
  double uniform();
  // (0, 1).
  double uniform_open();
  // [0, 2*pi).
  double uniform_angle();
  // Box-Muller, one uniform pair per draw (cosine branch).
  double normal();
  // Cauchy centered at 0: scale * tan(pi * (u - 1/2)).
  double cauchy(double scale);
  // Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t uniform_index(std::uint64_t n);
  // `count` distinct indices from [0, n) by partial Fisher-Yates, in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count);

  // Independent stream derived from this generator's seed; does not advance it.
  SeededRng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace kpca
