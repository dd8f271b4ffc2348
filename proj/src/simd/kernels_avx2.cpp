// Compiled with -mavx2 (and without -mfma); only entered after a runtime CPU check.

#include <immintrin.h>

#include "mledist/simd/kernels.hpp"

namespace mledist::simd::avx2 {

std::size_t count_nonneg_combinations(const double* weights, std::size_t rows,
                                      const double* coef, std::size_t cols) noexcept {
  std::size_t count = 0;
  std::size_t r = 0;
  const __m256d zero = _mm256_setzero_pd();
  for (; r + 4 <= rows; r += 4) {
    __m256d s = _mm256_setzero_pd();
    for (std::size_t c = 0; c < cols; ++c) {
      const __m256d w = _mm256_loadu_pd(weights + c * rows + r);
      s = _mm256_add_pd(s, _mm256_mul_pd(w, _mm256_set1_pd(coef[c])));
    }
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(s, zero, _CMP_GE_OQ));
    count += static_cast<std::size_t>(__builtin_popcount(static_cast<unsigned>(mask)));
  }
  if (r < rows) {
    // Tail rows: same arithmetic as the reference, one row at a time.
    for (; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < cols; ++c) s = s + weights[c * rows + r] * coef[c];
      count += s >= 0.0 ? 1u : 0u;
    }
  }
  return count;
}

PowerSums power_sums(const double* values, std::size_t size) noexcept {
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s4 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= size; i += 4) {
    const __m256d v = _mm256_loadu_pd(values + i);
    const __m256d v2 = _mm256_mul_pd(v, v);
    s1 = _mm256_add_pd(s1, v);
    s2 = _mm256_add_pd(s2, v2);
    s4 = _mm256_add_pd(s4, _mm256_mul_pd(v2, v2));
  }
  alignas(32) double l1[4], l2[4], l4[4];
  _mm256_store_pd(l1, s1);
  _mm256_store_pd(l2, s2);
  _mm256_store_pd(l4, s4);
  PowerSums out;
  out.sum = (l1[0] + l1[1]) + (l1[2] + l1[3]);
  out.sum_sq = (l2[0] + l2[1]) + (l2[2] + l2[3]);
  out.sum_quad = (l4[0] + l4[1]) + (l4[2] + l4[3]);
  for (; i < size; ++i) {
    const double v = values[i];
    const double v2 = v * v;
    out.sum += v;
    out.sum_sq += v2;
    out.sum_quad += v2 * v2;
  }
  return out;
}

}  // namespace mledist::simd::avx2
