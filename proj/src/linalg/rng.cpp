#include "kpca/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "kpca/error.hpp"

namespace kpca {
namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t counter)
    : seed_(seed), key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)), counter_(counter) {}

std::uint64_t SeededRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGoldenGamma);
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededRng::uniform_angle() { return 2.0 * std::numbers::pi * uniform(); }

double SeededRng::normal() {
  const double u1 = uniform_open();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SeededRng::cauchy(double scale) {
  return scale * std::tan(std::numbers::pi * (uniform_open() - 0.5));
}

std::uint64_t SeededRng::uniform_index(std::uint64_t n) {
  if (n == 0) fail(ErrorKind::kParameter, "uniform_index: empty range");
  // Reject the low sliver that would bias the modulo.
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

std::vector<std::size_t> SeededRng::sample_without_replacement(std::size_t n, std::size_t count) {
  if (count > n) {
    fail(ErrorKind::kParameter, "sample_without_replacement: cannot draw " +
                                    std::to_string(count) + " from " + std::to_string(n));
  }
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  return pool;
}

SeededRng SeededRng::fork(std::uint64_t stream) const {
  return SeededRng(mix64(seed_ + mix64(stream + kGoldenGamma)));
}

}  // namespace kpca
