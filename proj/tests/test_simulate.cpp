#include <doctest.h>

#include <cmath>
#include <numeric>

#include "volspec/curve.hpp"
#include "volspec/errors.hpp"
#include "volspec/simulate.hpp"

using namespace volspec;

TEST_CASE("degenerate curve and no noise gives zeros") {
  const auto zero = VolatilityCurve::tabulated_unchecked({{0.0, 0.0}, {1.0, 0.0}});
  const auto obs = simulate_observations(zero, 50, 0.0, 3);
  CHECK(obs.n == 50);
  CHECK(obs.values.size() == 50);
  for (double y : obs.values) CHECK(y == 0.0);
}

TEST_CASE("same seed reproduces, different seeds differ") {
  const auto q = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  const auto a = simulate_observations(q, 1000, 0.01, 42);
  const auto b = simulate_observations(q, 1000, 0.01, 42);
  const auto c = simulate_observations(q, 1000, 0.01, 43);
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.seed == 42);

  ObservationSimulator sim(q, 1000, 0.01);
  CHECK(sim.simulate(42).values == a.values);
  std::vector<double> out(1000);
  sim.simulate_into(42, out);
  CHECK(out == a.values);
}

TEST_CASE("latent path does not depend on the noise level") {
  const auto q = VolatilityCurve::constant(1.0);
  const auto clean = simulate_observations(q, 200, 0.0, 9);
  const auto noisy = simulate_observations(q, 200, 0.5, 9);
  const auto noisy2 = simulate_observations(q, 200, 1.0, 9);
  // Y = X + delta * eps with the same X and eps across delta
  for (std::size_t i = 0; i < 200; ++i) {
    const double e1 = (noisy.values[i] - clean.values[i]) / 0.5;
    const double e2 = (noisy2.values[i] - clean.values[i]) / 1.0;
    CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
  }
}

TEST_CASE("increment variance without noise") {
  const std::size_t n = 100000;
  const auto obs = simulate_observations(VolatilityCurve::constant(1.0), n, 0.0, 2024);
  double prev = 0.0, sum = 0.0, sum_sq = 0.0;
  for (double y : obs.values) {
    const double d = y - prev;
    sum += d;
    sum_sq += d * d;
    prev = y;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  CHECK(var >= 0.9 / n);
  CHECK(var <= 1.1 / n);
}

TEST_CASE("increment variance with noise is sigma^2/n + 2 delta^2") {
  // Monte Carlo over replications of one interior increment
  const std::size_t n = 100, reps = 20000;
  const double sigma = 0.8, delta = 0.05;
  const auto curve = VolatilityCurve::constant(sigma);
  ObservationSimulator sim(curve, n, delta);
  std::vector<double> y(n);
  double sum = 0.0, sum_sq = 0.0, sum_4 = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    sim.simulate_into(splitmix64(r), y);
    const double d = y[50] - y[49];
    sum += d;
    sum_sq += d * d;
    sum_4 += d * d * d * d;
  }
  const double want = sigma * sigma / n + 2 * delta * delta;
  const double m2 = sum_sq / reps;
  const double se = std::sqrt((sum_4 / reps - m2 * m2) / reps);
  CHECK(std::abs(m2 - want) <= 3 * se);
}

TEST_CASE("gaussian stream moments") {
  GaussianStream g(7);
  const std::size_t m = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double z = g.next();
    s1 += z;
    s2 += z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / m) <= 4 / std::sqrt(double(m)));
  CHECK(std::abs(s2 / m - 1) <= 4 * std::sqrt(2.0 / m));
  CHECK(std::abs(s4 / m - 3) <= 4 * std::sqrt(96.0 / m));
}

TEST_CASE("splitmix64 reference values") {
  // published SplitMix64 outputs for state 0: the first draw is mix(0x9E3779B97F4A7C15)
  static_assert(splitmix64(0) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(0) != splitmix64(1));
}

TEST_CASE("configuration errors") {
  const auto q = VolatilityCurve::constant(1.0);
  CHECK_THROWS_AS(simulate_observations(q, 0, 0.1, 1), ConfigError);
  CHECK_THROWS_AS(simulate_observations(q, 10, -0.1, 1), ConfigError);
  ObservationSimulator sim(q, 10, 0.1);
  std::vector<double> wrong(9);
  CHECK_THROWS_AS(sim.simulate_into(1, wrong), ConfigError);
}
