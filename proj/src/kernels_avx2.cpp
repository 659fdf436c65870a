#include <immintrin.h>

#include "sta/kernels.hpp"

namespace sta::kernels::avx2 {

void axpy_f64(double* c, const double* b, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(b + j));
    _mm256_storeu_pd(c + j, _mm256_add_pd(_mm256_loadu_pd(c + j), prod));
  }
  scalar::axpy_f64(c + j, b + j, a, n - j);
}

void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n) {
  const __m256i vinf = _mm256_set1_epi32(inf);
  std::size_t j = 0;
  if (a == inf) {
    for (; j + 8 <= n; j += 8) {
      auto* pc = reinterpret_cast<__m256i*>(c + j);
      _mm256_storeu_si256(pc, _mm256_min_epi32(_mm256_loadu_si256(pc), vinf));
    }
  } else {
    const __m256i va = _mm256_set1_epi32(a);
    for (; j + 8 <= n; j += 8) {
      const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + j));
      __m256i sum = _mm256_add_epi32(va, vb);
      sum = _mm256_blendv_epi8(sum, vinf, _mm256_cmpeq_epi32(vb, vinf));
      auto* pc = reinterpret_cast<__m256i*>(c + j);
      _mm256_storeu_si256(pc, _mm256_min_epi32(_mm256_loadu_si256(pc), sum));
    }
  }
  scalar::minplus_i32(c + j, b + j, a, inf, n - j);
}

}  // namespace sta::kernels::avx2
