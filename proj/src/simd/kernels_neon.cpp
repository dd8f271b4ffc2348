#include <arm_neon.h>

#include "mledist/simd/kernels.hpp"

namespace mledist::simd::neon {

std::size_t count_nonneg_combinations(const double* weights, std::size_t rows,
                                      const double* coef, std::size_t cols) noexcept {
  std::size_t count = 0;
  std::size_t r = 0;
  const float64x2_t zero = vdupq_n_f64(0.0);
  for (; r + 2 <= rows; r += 2) {
    float64x2_t s = vdupq_n_f64(0.0);
    for (std::size_t c = 0; c < cols; ++c) {
      const float64x2_t w = vld1q_f64(weights + c * rows + r);
      // vmulq + vaddq (not vfmaq) to round like the scalar reference.
      s = vaddq_f64(s, vmulq_f64(w, vdupq_n_f64(coef[c])));
    }
    const uint64x2_t ge = vcgeq_f64(s, zero);
    count += (vgetq_lane_u64(ge, 0) ? 1u : 0u) + (vgetq_lane_u64(ge, 1) ? 1u : 0u);
  }
  for (; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s = s + weights[c * rows + r] * coef[c];
    count += s >= 0.0 ? 1u : 0u;
  }
  return count;
}

PowerSums power_sums(const double* values, std::size_t size) noexcept {
  float64x2_t s1 = vdupq_n_f64(0.0);
  float64x2_t s2 = vdupq_n_f64(0.0);
  float64x2_t s4 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= size; i += 2) {
    const float64x2_t v = vld1q_f64(values + i);
    const float64x2_t v2 = vmulq_f64(v, v);
    s1 = vaddq_f64(s1, v);
    s2 = vaddq_f64(s2, v2);
    s4 = vaddq_f64(s4, vmulq_f64(v2, v2));
  }
  PowerSums out;
  out.sum = vgetq_lane_f64(s1, 0) + vgetq_lane_f64(s1, 1);
  out.sum_sq = vgetq_lane_f64(s2, 0) + vgetq_lane_f64(s2, 1);
  out.sum_quad = vgetq_lane_f64(s4, 0) + vgetq_lane_f64(s4, 1);
  for (; i < size; ++i) {
    const double v = values[i];
    const double v2 = v * v;
    out.sum += v;
    out.sum_sq += v2;
    out.sum_quad += v2 * v2;
  }
  return out;
}

}  // namespace mledist::simd::neon
