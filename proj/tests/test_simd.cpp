#include <doctest.h>

#include <cstring>
#include <vector>

#include "mledist/error.hpp"
#include "mledist/rng.hpp"
#include "mledist/simd/kernels.hpp"

using namespace mledist;

namespace {

std::vector<double> random_values(std::size_t size, std::uint64_t seed, double shift) {
  RngStream rng(seed, 0);
  std::vector<double> v(size);
  for (auto& x : v) x = rng.normal() + shift;
  return v;
}

}  // namespace

TEST_CASE("count kernel: every variant matches the scalar reference exactly") {
  const std::size_t cols = 10;
  for (std::size_t rows : {1, 3, 4, 5, 17, 1000, 4096}) {
    std::vector<double> w(rows * cols);
    RngStream rng(rows, 1);
    for (auto& x : w) x = rng.exponential();
    const auto coef = random_values(cols, rows, 0.1);
    const std::size_t ref = simd::scalar::count_nonneg_combinations(w.data(), rows, coef.data(), cols);
    CHECK(ref <= rows);
#if defined(__x86_64__)
    if (simd::detected_isa() == simd::Isa::avx2) {
      CHECK(simd::avx2::count_nonneg_combinations(w.data(), rows, coef.data(), cols) == ref);
    }
#elif defined(__aarch64__)
    if (simd::detected_isa() == simd::Isa::neon) {
      CHECK(simd::neon::count_nonneg_combinations(w.data(), rows, coef.data(), cols) == ref);
    }
#endif
    CHECK(simd::count_nonneg_combinations(w, rows, coef) == ref);
  }
}

TEST_CASE("count kernel: exact zero sums count as nonnegative") {
  const std::vector<double> w = {1.0, 2.0, 1.0, 2.0};
  const std::vector<double> coef = {1.0, -1.0};
  CHECK(simd::count_nonneg_combinations(w, 2, coef) == 2);
}

TEST_CASE("power sums: variants agree to rounding") {
  for (std::size_t size : {0, 1, 3, 8, 1001, 100000}) {
    const auto v = random_values(size, size + 11, 0.3);
    const auto ref = simd::scalar::power_sums(v.data(), v.size());
    double direct = 0.0;
    for (double x : v) direct += x;
    CHECK(ref.sum == doctest::Approx(direct).epsilon(1e-12));
    simd::PowerSums other = ref;
#if defined(__x86_64__)
    if (simd::detected_isa() == simd::Isa::avx2) other = simd::avx2::power_sums(v.data(), v.size());
#elif defined(__aarch64__)
    if (simd::detected_isa() == simd::Isa::neon) other = simd::neon::power_sums(v.data(), v.size());
#endif
    CHECK(other.sum == doctest::Approx(ref.sum).epsilon(1e-12));
    CHECK(other.sum_sq == doctest::Approx(ref.sum_sq).epsilon(1e-12));
    CHECK(other.sum_quad == doctest::Approx(ref.sum_quad).epsilon(1e-12));
  }
}

TEST_CASE("dispatch can be forced to scalar") {
  const simd::Isa before = simd::active_isa();
  CHECK(simd::set_active_isa(simd::Isa::scalar) == simd::Isa::scalar);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  simd::set_active_isa(before);
  CHECK(simd::active_isa() == before);
}

TEST_CASE("dispatch rejects mismatched shapes") {
  const std::vector<double> w(10, 1.0);
  const std::vector<double> coef(3, 1.0);
  CHECK_THROWS_AS(simd::count_nonneg_combinations(w, 4, coef), DomainError);
}
