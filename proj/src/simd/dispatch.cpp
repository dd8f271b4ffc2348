#include <atomic>

#include "mledist/error.hpp"
#include "mledist/simd/kernels.hpp"

namespace mledist::simd {

namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(MLEDIST_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{detected_isa()};
  return isa;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

Isa detected_isa() noexcept {
  if (cpu_has(Isa::avx2)) return Isa::avx2;
  if (cpu_has(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() noexcept { return active().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) noexcept {
  if (!cpu_has(isa)) isa = Isa::scalar;
  active().store(isa, std::memory_order_relaxed);
  return isa;
}

std::size_t count_nonneg_combinations(std::span<const double> weights, std::size_t rows,
                                      std::span<const double> coef) {
  if (weights.size() != rows * coef.size()) {
    throw DomainError("count_nonneg_combinations: weights size != rows * coef size");
  }
  switch (active_isa()) {
#if defined(MLEDIST_HAVE_AVX2_TU)
    case Isa::avx2:
      return avx2::count_nonneg_combinations(weights.data(), rows, coef.data(), coef.size());
#endif
#if defined(__aarch64__)
    case Isa::neon:
      return neon::count_nonneg_combinations(weights.data(), rows, coef.data(), coef.size());
#endif
    default:
      return scalar::count_nonneg_combinations(weights.data(), rows, coef.data(),
                                               coef.size());
  }
}

PowerSums power_sums(std::span<const double> values) {
  switch (active_isa()) {
#if defined(MLEDIST_HAVE_AVX2_TU)
    case Isa::avx2:
      return avx2::power_sums(values.data(), values.size());
#endif
#if defined(__aarch64__)
    case Isa::neon:
      return neon::power_sums(values.data(), values.size());
#endif
    default:
      return scalar::power_sums(values.data(), values.size());
  }
}

}  // namespace mledist::simd
