#include <atomic>
#include <cstdlib>
#include <string>

#include "kpca/error.hpp"
#include "kpca/simd.hpp"

namespace kpca::simd {

std::string_view to_string(Level level) {
  switch (level) {
    case Level::kScalar: return "scalar";
    case Level::kAvx2: return "avx2";
    case Level::kNeon: return "neon";
  }
  return "unknown";
}

std::optional<Level> parse_level(std::string_view name) {
  if (name == "scalar") return Level::kScalar;
  if (name == "avx2") return Level::kAvx2;
  if (name == "neon") return Level::kNeon;
  return std::nullopt;
}

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* lookup(Level level) {
  switch (level) {
    case Level::kScalar: return &detail::kScalarTable;
    case Level::kAvx2: return cpu_has_avx2_fma() ? detail::avx2_table() : nullptr;
    case Level::kNeon: return detail::neon_table();
  }
  return nullptr;
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("KPCA_SIMD"); env != nullptr && *env != '\0') {
    const std::string requested(env);
    if (requested != "auto") {
      auto level = parse_level(requested);
      if (level && lookup(*level) != nullptr) return lookup(*level);
      // Unknown or unsupported override falls back to detection.
    }
  }
  return lookup(detect_best());
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

Level detect_best() {
  if (lookup(Level::kAvx2) != nullptr) return Level::kAvx2;
  if (lookup(Level::kNeon) != nullptr) return Level::kNeon;
  return Level::kScalar;
}

bool supported(Level level) { return lookup(level) != nullptr; }

const KernelTable& table(Level level) {
  const KernelTable* t = lookup(level);
  if (t == nullptr) {
    fail(ErrorKind::kParameter,
         "SIMD level '" + std::string(to_string(level)) + "' is not available on this CPU");
  }
  return *t;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Level level) { active_slot().store(&table(level), std::memory_order_release); }

}  // namespace kpca::simd
