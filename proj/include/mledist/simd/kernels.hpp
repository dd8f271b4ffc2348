#pragma once

// Data-parallel inner loops shared by the Monte Carlo routines.
//
// Every kernel has a scalar reference implementation and, where the target
// supports it, an AVX2 (x86-64) or NEON (AArch64) variant picked at runtime.
// Variants keep the per-element operation order of the reference, so
// count_nonneg_combinations is bit-identical across variants; power_sums
// reorders the reduction and agrees to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace mledist::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;

/// Best variant this CPU can run.
Isa detected_isa() noexcept;
/// Variant used by the dispatching entry points (default: detected_isa()).
Isa active_isa() noexcept;
/// Forces a variant; falls back to scalar if the CPU lacks it. Returns the
/// variant actually selected. Not thread-safe; meant for tests and the CLI.
Isa set_active_isa(Isa isa) noexcept;

struct PowerSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  double sum_quad = 0.0;
};

/// Column-major block of `rows` weight vectors of length `cols`:
/// weights[c * rows + r] is coefficient c of vector r.
///
/// Returns #{r : sum_c weights[c*rows + r] * coef[c] >= 0}, accumulating c in
/// increasing order for every r.
std::size_t count_nonneg_combinations(std::span<const double> weights, std::size_t rows,
                                      std::span<const double> coef);

/// sum v, sum v^2, sum v^4.
PowerSums power_sums(std::span<const double> values);

namespace scalar {
std::size_t count_nonneg_combinations(const double* weights, std::size_t rows,
                                      const double* coef, std::size_t cols) noexcept;
PowerSums power_sums(const double* values, std::size_t size) noexcept;
}  // namespace scalar

namespace avx2 {
std::size_t count_nonneg_combinations(const double* weights, std::size_t rows,
                                      const double* coef, std::size_t cols) noexcept;
PowerSums power_sums(const double* values, std::size_t size) noexcept;
}  // namespace avx2

namespace neon {
std::size_t count_nonneg_combinations(const double* weights, std::size_t rows,
                                      const double* coef, std::size_t cols) noexcept;
PowerSums power_sums(const double* values, std::size_t size) noexcept;
}  // namespace neon

}  // namespace mledist::simd
