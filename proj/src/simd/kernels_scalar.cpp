#include "volspec/simd.hpp"

namespace volspec::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += a[i] * b[i];
  return acc;
}

void gemv_scalar(const double* m, std::size_t rows, std::size_t cols,
                 const double* x, double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(m + r * cols, x, cols);
}

void first_difference_scalar(const double* x, std::size_t len, double prev,
                             double* out) {
  for (std::size_t i = 0; i < len; ++i) {
    out[i] = x[i] - prev;
    prev = x[i];
  }
}

}  // namespace

const KernelTable kScalarKernels{Isa::scalar, dot_scalar, gemv_scalar,
                                 first_difference_scalar};

}  // namespace volspec::simd::detail
