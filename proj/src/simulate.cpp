#include "volspec/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "volspec/errors.hpp"

namespace volspec {

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double kScale = 0x1.0p-53;
  // u1 in (0,1], u2 in [0,1)
  const double u1 = static_cast<double>((engine_() >> 11) + 1) * kScale;
  const double u2 = static_cast<double>(engine_() >> 11) * kScale;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ObservationSimulator::ObservationSimulator(const VolatilityCurve& curve, std::size_t n,
                                           double delta)
    : cell_sd_(n), delta_(delta) {
  if (n < 1) throw ConfigError("simulate: n must be >= 1");
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("simulate: delta must be >= 0");
  for (std::size_t i = 1; i <= n; ++i) cell_sd_[i - 1] = std::sqrt(std::max(curve.cell_variance(i, n), 0.0));
}

void ObservationSimulator::simulate_into(std::uint64_t seed, std::span<double> out) const {
  if (out.size() != cell_sd_.size()) throw ConfigError("simulate_into: output size mismatch");
  GaussianStream gauss(seed);
  double x = 0.0;
  for (std::size_t i = 0; i < cell_sd_.size(); ++i) {
    x += cell_sd_[i] * gauss.next();
    out[i] = x + delta_ * gauss.next();
  }
}

ObservationSeries ObservationSimulator::simulate(std::uint64_t seed) const {
  ObservationSeries series;
  series.n = cell_sd_.size();
  series.delta = delta_;
  series.seed = seed;
  series.values.resize(series.n);
  simulate_into(seed, series.values);
  return series;
}

ObservationSeries simulate_observations(const VolatilityCurve& curve, std::size_t n,
                                        double delta, std::uint64_t seed) {
  return ObservationSimulator(curve, n, delta).simulate(seed);
}

}  // namespace volspec
