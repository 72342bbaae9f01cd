#include <arm_neon.h>

#include "volspec/simd.hpp"

namespace volspec::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t len) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

void gemv_neon(const double* m, std::size_t rows, std::size_t cols,
               const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_neon(m + r * cols, x, cols);
}

void first_difference_neon(const double* x, std::size_t len, double prev,
                           double* out) {
  if (len == 0) return;
  out[0] = x[0] - prev;
  std::size_t i = 1;
  for (; i + 2 <= len; i += 2) {
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(x + i), vld1q_f64(x + i - 1)));
  }
  for (; i < len; ++i) out[i] = x[i] - x[i - 1];
}

}  // namespace

const KernelTable kNeonKernels{Isa::neon, dot_neon, gemv_neon,
                               first_difference_neon};

}  // namespace volspec::simd::detail
