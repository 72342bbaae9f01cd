#include <cassert>
#include <cstdlib>
#include <string>

#include "volspec/simd.hpp"

namespace volspec::simd {
namespace {

bool cpu_has_avx2() {
#if defined(VOLSPEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() {
  if (const char* env = std::getenv("VOLSPEC_SIMD")) {
    if (std::string(env) == "scalar") return detail::kScalarKernels;
  }
#if defined(VOLSPEC_HAVE_AVX2)
  if (cpu_has_avx2()) return detail::kAvx2Kernels;
#endif
#if defined(VOLSPEC_HAVE_NEON)
  return detail::kNeonKernels;
#endif
  return detail::kScalarKernels;
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &detail::kScalarKernels;
    case Isa::avx2:
#if defined(VOLSPEC_HAVE_AVX2)
      if (cpu_has_avx2()) return &detail::kAvx2Kernels;
#endif
      return nullptr;
    case Isa::neon:
#if defined(VOLSPEC_HAVE_NEON)
      return &detail::kNeonKernels;
#endif
      return nullptr;
  }
  return nullptr;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return active().dot(a.data(), b.data(), a.size());
}

void gemv(std::span<const double> m, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> out) {
  assert(m.size() == rows * cols && x.size() == cols && out.size() == rows);
  active().gemv(m.data(), rows, cols, x.data(), out.data());
}

void first_difference(std::span<const double> x, double prev,
                      std::span<double> out) {
  assert(out.size() == x.size());
  active().first_difference(x.data(), x.size(), prev, out.data());
}

}  // namespace volspec::simd
