#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "volspec/curve.hpp"

namespace volspec {

/// n noisy samples Y_i = X_{i/n} + eps_i, i = 1..n.
struct ObservationSeries {
  std::size_t n = 0;
  double delta = 0.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
};

/// SplitMix64 finalizer; a bijective 64-bit avalanche mix.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Standard normal draws: Box-Muller on 53-bit uniforms from mt19937_64,
/// both outputs of each pair used. Fixed so seeds reproduce across standard
/// libraries.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Exact simulator for one (curve, n, delta) configuration. Per-cell standard
/// deviations are computed once at construction so repeated draws are cheap.
class ObservationSimulator {
 public:
  ObservationSimulator(const VolatilityCurve& curve, std::size_t n, double delta);

  std::size_t n() const { return cell_sd_.size(); }
  double delta() const { return delta_; }

  ObservationSeries simulate(std::uint64_t seed) const;
  /// Writes Y_1..Y_n into `out` (size n).
  void simulate_into(std::uint64_t seed, std::span<double> out) const;

 private:
  std::vector<double> cell_sd_;
  double delta_;
};

/// X increments are independent N(0, cell_variance(curve, i, n)); noise is
/// i.i.d. N(0, delta^2). One increment and one noise draw per sample, in that
/// order, so the latent path for a seed does not depend on delta.
ObservationSeries simulate_observations(const VolatilityCurve& curve, std::size_t n,
                                        double delta, std::uint64_t seed);

}  // namespace volspec
