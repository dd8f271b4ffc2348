#include "mledist/simd/kernels.hpp"

namespace mledist::simd::scalar {

std::size_t count_nonneg_combinations(const double* weights, std::size_t rows,
                                      const double* coef, std::size_t cols) noexcept {
  std::size_t count = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s = s + weights[c * rows + r] * coef[c];
    count += s >= 0.0 ? 1u : 0u;
  }
  return count;
}

PowerSums power_sums(const double* values, std::size_t size) noexcept {
  PowerSums out;
  for (std::size_t i = 0; i < size; ++i) {
    const double v = values[i];
    const double v2 = v * v;
    out.sum += v;
    out.sum_sq += v2;
    out.sum_quad += v2 * v2;
  }
  return out;
}

}  // namespace mledist::simd::scalar
