#pragma once

// Data-parallel kernels behind the spectral statistics.
//
// Each kernel has a scalar reference implementation and, where the build
// target supports it, an AVX2+FMA (x86-64) or NEON (aarch64) variant. The
// variant is chosen once per process from CPU feature detection; setting the
// environment variable VOLSPEC_SIMD=scalar forces the reference path.
// Vector variants reassociate sums, so they agree with the scalar reference
// to rounding, not bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace volspec::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t len);
  /// out[r] = sum_c m[r * cols + c] * x[c], m row-major rows x cols
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols,
               const double* x, double* out);
  /// out[i] = x[i] - x[i-1] for i >= 1, out[0] = x[0] - prev
  void (*first_difference)(const double* x, std::size_t len, double prev,
                           double* out);
};

/// Kernels selected for this process (feature detection + VOLSPEC_SIMD).
const KernelTable& active();

/// Kernel table for a specific ISA; nullptr when this build or CPU lacks it.
const KernelTable* table_for(Isa isa);

std::string_view isa_name(Isa isa);

double dot(std::span<const double> a, std::span<const double> b);
void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> out);
void first_difference(std::span<const double> x, double prev,
                      std::span<double> out);

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(VOLSPEC_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(VOLSPEC_HAVE_NEON)
extern const KernelTable kNeonKernels;
#endif
}  // namespace detail

}  // namespace volspec::simd
