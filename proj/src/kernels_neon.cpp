#include <arm_neon.h>

#include "sta/kernels.hpp"

namespace sta::kernels::neon {

void axpy_f64(double* c, const double* b, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t prod = vmulq_f64(va, vld1q_f64(b + j));
    vst1q_f64(c + j, vaddq_f64(vld1q_f64(c + j), prod));
  }
  scalar::axpy_f64(c + j, b + j, a, n - j);
}

void minplus_i32(std::int32_t* c, const std::int32_t* b, std::int32_t a, std::int32_t inf,
                 std::size_t n) {
  const int32x4_t vinf = vdupq_n_s32(inf);
  std::size_t j = 0;
  if (a == inf) {
    for (; j + 4 <= n; j += 4) vst1q_s32(c + j, vminq_s32(vld1q_s32(c + j), vinf));
  } else {
    const int32x4_t va = vdupq_n_s32(a);
    for (; j + 4 <= n; j += 4) {
      const int32x4_t vb = vld1q_s32(b + j);
      int32x4_t sum = vaddq_s32(va, vb);
      sum = vbslq_s32(vceqq_s32(vb, vinf), vinf, sum);
      vst1q_s32(c + j, vminq_s32(vld1q_s32(c + j), sum));
    }
  }
  scalar::minplus_i32(c + j, b + j, a, inf, n - j);
}

}  // namespace sta::kernels::neon
