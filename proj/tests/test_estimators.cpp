#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "volspec/curve.hpp"
#include "volspec/errors.hpp"
#include "volspec/estimators.hpp"
#include "volspec/mc.hpp"
#include "volspec/simulate.hpp"
#include "volspec/spectral.hpp"

using namespace volspec;
using oracle::pi;

namespace {

EstimatorConfig figure1_config() {
  EstimatorConfig c;
  c.grid = BlockGrid(30000, 30);
  c.J = 43;
  c.delta = 0.01;
  return c;
}

// Statistics whose squares equal their idealized means h^2 pi^-2 j^-2 s_k + delta^2/n.
SpectralCoefficients idealized(const BlockGrid& g, std::size_t J, double delta,
                               const std::function<double(double)>& s2) {
  SpectralCoefficients s;
  s.grid = g;
  s.J = J;
  s.delta = delta;
  s.n = g.n();
  s.values.resize(J * g.blocks());
  for (std::size_t j = 1; j <= J; ++j)
    for (std::size_t k = 0; k < g.blocks(); ++k)
      s.at(j, k) = std::sqrt(theoretical_variance(s2(g.block_center(k)), j, g.h(), delta / std::sqrt(double(g.n()))));
  return s;
}

double quartic_sigma2(double t) { return std::pow(0.02 + 0.2 * std::pow(t - 0.5, 4), 2); }

}  // namespace

TEST_CASE("estimator configuration") {
  auto c = figure1_config();
  CHECK(c.h0() == doctest::Approx(577.3502691896).epsilon(1e-12));
  CHECK_NOTHROW(c.validate());
  c.J = 1001;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.J = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = figure1_config();
  c.spot_bandwidth = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = figure1_config();
  c.delta = 0.0;
  CHECK(std::isinf(c.h0()));
}

TEST_CASE("box spot estimate on idealized inputs is the window average") {
  const BlockGrid g(3000, 30);
  const auto s = idealized(g, 1, 0.01, quartic_sigma2);
  for (double t : {0.0, 0.2, 0.5, 0.93}) {
    for (double b : {0.05, 0.2}) {
      double acc = 0.0;
      int count = 0;
      // closed window; centres exactly on the edge (up to rounding) count
      for (std::size_t k = 0; k < 30; ++k)
        if (std::abs(g.block_center(k) - t) <= b + 1e-12) acc += quartic_sigma2(g.block_center(k)), ++count;
      CHECK(spot_block_estimate(s, t, b) == doctest::Approx(acc / count).epsilon(1e-11));
    }
  }
  CHECK_THROWS_AS(spot_block_estimate(s, 0.0, 0.001), EstimationError);
  CHECK_THROWS_AS(spot_block_estimate(s, 1.2, 0.1), DomainError);
}

TEST_CASE("single-block window with zero observations is zero") {
  const BlockGrid g(20, 2);
  const ObservationSeries zero{20, 0.0, std::vector<double>(20, 0.0), 0};
  const auto s = compute_spectral_stats(zero, g, 1);
  CHECK(spot_block_estimate(s, 0.25, 0.1) == 0.0);
}

TEST_CASE("box spot estimate over all blocks is unbiased for constant sigma") {
  const double sigma = 0.5, delta = 0.01;
  const std::size_t n = 3000, reps = 400;
  const BlockGrid g(n, 30);
  const WeightTable table(g, 1);
  ObservationSimulator sim(VolatilityCurve::constant(sigma), n, delta);
  std::vector<double> y(n), inc(n);
  SpectralCoefficients s;
  s.grid = g;
  s.J = 1;
  s.delta = delta;
  s.n = n;
  s.values.resize(30);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    sim.simulate_into(77 + r, y);
    compute_spectral_stats(y, table, inc, s.values);
    const double v = spot_block_estimate(s, 0.5, 1.0);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / (reps - 1));
  CHECK(std::abs(mean - sigma * sigma) <= 3 * se);
}

TEST_CASE("local-linear smoother") {
  std::vector<double> x(12), affine(12), flat(12, 3.5);
  for (std::size_t i = 0; i < 12; ++i) {
    x[i] = (i + 0.5) / 12;
    affine[i] = 2.0 - 3.0 * x[i];
  }
  for (bool loo : {false, true}) {
    const auto fa = local_linear_smooth(x, affine, 0.3, loo);
    const auto ff = local_linear_smooth(x, flat, 0.3, loo);
    for (std::size_t i = 0; i < 12; ++i) {
      CHECK(fa[i] == doctest::Approx(affine[i]).epsilon(1e-12));
      CHECK(ff[i] == doctest::Approx(3.5).epsilon(1e-13));
    }
  }
  CHECK_THROWS_AS(local_linear_smooth(x, affine, 0.05), EstimationError);
  CHECK_THROWS_AS(local_linear_smooth(x, affine, -1.0), DomainError);
  // leave-one-out ignores the point itself
  auto spiked = flat;
  spiked[5] = 1000.0;
  CHECK(local_linear_smooth(x, spiked, 0.3, true)[5] == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(box_smooth(x, spiked, 0.3, true)[5] == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("local-linear removes the boundary bias of the box kernel") {
  const auto curve = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  const auto cfg = figure1_config();
  const WeightTable table(cfg.grid, 1);
  ObservationSimulator sim(curve, cfg.grid.n(), cfg.delta);
  std::vector<double> y(cfg.grid.n()), inc(cfg.grid.n());
  SpectralCoefficients s;
  s.grid = cfg.grid;
  s.J = 1;
  s.delta = cfg.delta;
  s.n = cfg.grid.n();
  s.values.resize(30);
  const std::size_t reps = 500;
  double box = 0.0, ll = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    sim.simulate_into(substream_seed(5, r), y);
    compute_spectral_stats(y, table, inc, s.values);
    box += spot_box(s, cfg.spot_bandwidth).values[0];
    ll += spot_local_linear(s, cfg.spot_bandwidth).values[0];
  }
  const double truth = curve.sigma2(cfg.grid.block_center(0));
  const double box_bias = box / reps - truth, ll_bias = ll / reps - truth;
  MESSAGE("k=0 bias: box " << box_bias << ", local-linear " << ll_bias);
  CHECK(std::abs(ll_bias) < 0.25 * std::abs(box_bias));
}

TEST_CASE("spot floor") {
  const BlockGrid g(40, 4);
  auto s = idealized(g, 1, 0.0, [](double t) { return t < 0.5 ? 1.0 : 0.0; });
  EstimatorConfig c;
  c.grid = g;
  c.J = 1;
  c.spot_kernel = SpotKernel::box;
  c.spot_bandwidth = 0.01;
  const auto est = estimate_spot(s, c);
  CHECK(est.values[0] == doctest::Approx(1.0));
  CHECK(est.values[3] == doctest::Approx(1e-3));
  CHECK(est.centers.size() == est.values.size());
}

TEST_CASE("weights") {
  const std::vector<double> spot = {1.0, 0.3, 2.0};
  const auto one = compute_weights(spot, 10.0, 1);
  for (double v : one.values) CHECK(v == 1.0);

  const auto w2 = compute_weights(std::vector<double>{1.0}, 10.0, 2);
  const double a = std::pow(1 + pi * pi / 100, -2), b = std::pow(1 + 4 * pi * pi / 100, -2);
  CHECK(w2.at(1, 0) == doctest::Approx(a / (a + b)).epsilon(1e-14));
  CHECK(w2.at(1, 0) == doctest::Approx(0.6170).epsilon(1e-4));

  for (double h0 : {0.5, 10.0, 577.35, 1e4}) {
    const auto w = compute_weights(spot, h0, 43);
    for (std::size_t k = 0; k < 3; ++k) {
      double sum = 0.0;
      for (std::size_t j = 1; j <= 43; ++j) {
        sum += w.at(j, k);
        if (j > 1) CHECK(w.at(j, k) < w.at(j - 1, k));
      }
      CHECK(std::abs(sum - 1.0) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(compute_weights(std::vector<double>{1.0, 0.0}, 10.0, 3), DomainError);
  CHECK_THROWS_AS(compute_weights(std::vector<double>{1.0, -2.0}, 10.0, 3), DomainError);
}

TEST_CASE("idealized inputs give the block Riemann sum") {
  const auto cfg = figure1_config();
  const auto s = idealized(cfg.grid, cfg.J, cfg.delta, quartic_sigma2);
  double riemann = 0.0;
  for (std::size_t k = 0; k < 30; ++k) riemann += cfg.grid.h() * quartic_sigma2(cfg.grid.block_center(k));
  for (const auto& spot : {std::vector<double>(30, 4e-4), std::vector<double>(30, 1e-2)}) {
    const auto w = compute_weights(spot, cfg.h0(), cfg.J);
    CHECK(estimate_iv(s, w, cfg).iv_hat == doctest::Approx(riemann).epsilon(1e-12));
  }
  const auto curve = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  CHECK(estimate_iv(s, oracle_weights(curve, cfg), cfg).iv_hat == doctest::Approx(riemann).epsilon(1e-12));
  CHECK(estimate_iv(s, cfg).iv_hat == doctest::Approx(riemann).epsilon(1e-12));
}

TEST_CASE("exact bias correction removes the discrete noise variance") {
  EstimatorConfig cfg;
  cfg.grid = BlockGrid(120, 30);
  cfg.J = 3;
  cfg.delta = 0.2;
  cfg.bias_correction = BiasCorrection::exact;
  const WeightTable table(cfg.grid, cfg.J);
  SpectralCoefficients s;
  s.grid = cfg.grid;
  s.J = cfg.J;
  s.delta = cfg.delta;
  s.n = 120;
  s.values.resize(cfg.J * 30);
  for (std::size_t j = 1; j <= cfg.J; ++j)
    for (std::size_t k = 0; k < 30; ++k) s.at(j, k) = cfg.delta * std::sqrt(table.noise_factor(j, k));
  const auto w = compute_weights(std::vector<double>(30, 1.0), cfg.h0(), cfg.J);
  CHECK(std::abs(estimate_iv(s, w, cfg, &table).iv_hat) <= 1e-15);
  cfg.bias_correction = BiasCorrection::paper;
  CHECK(std::abs(estimate_iv(s, w, cfg, &table).iv_hat) > 1e-3);
  cfg.bias_correction = BiasCorrection::exact;
  CHECK_THROWS_AS(estimate_iv(s, w, cfg), ConfigError);
}

TEST_CASE("dimension mismatches") {
  const auto cfg = figure1_config();
  const auto s = idealized(cfg.grid, cfg.J, cfg.delta, quartic_sigma2);
  const auto w = compute_weights(std::vector<double>(29, 1e-3), cfg.h0(), cfg.J);
  CHECK_THROWS_AS(estimate_iv(s, w, cfg), ConfigError);
  auto other = cfg;
  other.J = 10;
  CHECK_THROWS_AS(estimate_iv(s, other), ConfigError);
  auto oracle_cfg = cfg;
  oracle_cfg.weight_mode = WeightMode::oracle;
  CHECK_THROWS_AS(estimate_iv(s, oracle_cfg), ConfigError);
}

TEST_CASE("statistics of later blocks ignore a level shift") {
  const auto curve = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  auto obs = simulate_observations(curve, 3000, 0.01, 8);
  auto shifted = obs;
  for (double& y : shifted.values) y += 0.37;
  const BlockGrid g(3000, 30);
  const auto a = compute_spectral_stats(obs, g, 10), b = compute_spectral_stats(shifted, g, 10);
  for (std::size_t j = 1; j <= 10; ++j) {
    for (std::size_t k = 1; k < 30; ++k) CHECK(b.at(j, k) == doctest::Approx(a.at(j, k)).epsilon(1e-9).scale(1e-12));
    // block 0 moves by c_1 * shift
    const double c1 = discrete_weights(j, 0, g)[0];
    CHECK(b.at(j, 0) - a.at(j, 0) == doctest::Approx(c1 * 0.37).epsilon(1e-9));
  }
}

TEST_CASE("oracle weights unbiased for constant sigma") {
  const std::size_t n = 30000, reps = 2000;
  auto cfg = figure1_config();
  cfg.weight_mode = WeightMode::oracle;
  const auto curve = VolatilityCurve::constant(0.02);
  const WeightTable table(cfg.grid, cfg.J);
  const auto w = oracle_weights(curve, cfg);
  ObservationSimulator sim(curve, n, cfg.delta);
  std::vector<double> y(n), inc(n);
  SpectralCoefficients s;
  s.grid = cfg.grid;
  s.J = cfg.J;
  s.delta = cfg.delta;
  s.n = n;
  s.values.resize(cfg.J * 30);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t r = 0; r < reps; ++r) {
    sim.simulate_into(substream_seed(321, r), y);
    compute_spectral_stats(y, table, inc, s.values);
    const double v = estimate_iv(s, w, cfg).iv_hat;
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / reps;
  const double sd = std::sqrt((sum_sq - reps * mean * mean) / (reps - 1));
  CHECK(std::abs(mean - 4e-4) <= 3 * sd / std::sqrt(double(reps)));
}

TEST_CASE("pilot weights do not read the block's own statistics") {
  const auto cfg = figure1_config();
  const auto curve = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  const auto obs = simulate_observations(curve, 30000, cfg.delta, 12);
  const WeightTable table(cfg.grid, cfg.J);
  auto s = compute_spectral_stats(obs, table);
  for (auto mode : {PilotMode::all_frequencies, PilotMode::first_frequency}) {
    auto c = cfg;
    c.pilot = mode;
    const auto before = pilot_spot(s, c);
    auto perturbed = s;
    for (std::size_t j = 1; j <= cfg.J; ++j) perturbed.at(j, 7) *= 3.0;
    const auto after = pilot_spot(perturbed, c);
    CHECK(after[7] == before[7]);
    CHECK(after[8] != before[8]);
    c.pilot_leave_one_out = false;
    CHECK(pilot_spot(perturbed, c)[7] != pilot_spot(s, c)[7]);
  }
  // multi-frequency pilot is exact on idealized inputs with a constant curve
  const auto ideal = idealized(cfg.grid, cfg.J, cfg.delta, [](double) { return 4e-4; });
  for (double v : pilot_spot(ideal, cfg)) CHECK(v == doctest::Approx(4e-4).epsilon(1e-10));
}

TEST_CASE("asymptotic standard deviation") {
  CHECK(asymptotic_sd(VolatilityCurve::constant(1.0), 1.0, 1) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  const auto q = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  CHECK(asymptotic_sd(q, 0.01, 16 * 30000) == doctest::Approx(asymptotic_sd(q, 0.01, 30000) / 2).epsilon(1e-14));
  const double s3 = oracle::integrate([](double t) { return std::pow(quartic_sigma2(t), 1.5); }, 0.0, 1.0);
  CHECK(s3 == doctest::Approx(1.2192e-5).epsilon(1e-4));
  CHECK(asymptotic_sd(q, 0.01, 30000) ==
        doctest::Approx(std::pow(30000.0, -0.25) * std::sqrt(8 * 0.01 * s3)).epsilon(1e-12));
}

TEST_CASE("global tuning inefficiency of the Figure 1 curve") {
  const auto q = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  const double s3 = oracle::integrate([](double t) { return std::pow(quartic_sigma2(t), 1.5); }, 0.0, 1.0);
  const double s4 = oracle::integrate([](double t) { return std::pow(quartic_sigma2(t), 2); }, 0.0, 1.0);
  const double want = std::sqrt(std::pow(s4, 0.75) / s3);
  CHECK(global_tuning_inefficiency(q) == doctest::Approx(want).epsilon(1e-12));
  CHECK(std::abs(global_tuning_inefficiency(q) - 1.02) <= 0.01);
  CHECK(global_tuning_inefficiency(VolatilityCurve::constant(0.3)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("printed cut-off rule") {
  const auto q = VolatilityCurve::shifted_quartic(0.02, 0.2, 0.5);
  const BlockGrid g(30000, 30);
  const double smax = std::sqrt(q.grid_max_sigma2());
  const auto want = static_cast<std::size_t>(std::ceil(2 * smax * g.h() / (pi * 0.01)));
  CHECK(printed_cutoff_rule(q, 0.01, g) == std::max<std::size_t>(want, 1));
  CHECK(printed_cutoff_rule(q, 0.01, g) != 43);
  CHECK(printed_cutoff_rule(VolatilityCurve::constant(100.0), 1e-6, g) == 1000);
}

TEST_CASE("maximum-likelihood refinement") {
  const double h = 1.0 / 30, h0 = 577.35, eps2 = 1e-4 * 1e-4 / 3;
  // J = 1: sigma2 = pi^2 h^-2 (y^2 - eps^2)
  const std::vector<double> one = {0.004};
  const auto r1 = mle_refine(one, 0.3, h, h0, eps2);
  CHECK(r1.converged);
  CHECK(r1.sigma2 == doctest::Approx(pi * pi / (h * h) * (0.004 * 0.004 - eps2)).epsilon(1e-12));

  // idealized means at sigma2 = 0.04
  std::vector<double> col(20);
  for (std::size_t j = 1; j <= 20; ++j) col[j - 1] = std::sqrt(theoretical_variance(0.04, j, h, std::sqrt(eps2)));
  const auto r = mle_refine(col, 0.01, h, h0, eps2);
  CHECK(r.converged);
  CHECK(r.sigma2 == doctest::Approx(0.04).epsilon(1e-8));
  const auto fixed = mle_refine(col, 0.04, h, h0, eps2);
  CHECK(fixed.sigma2 == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(std::abs(fixed.residual) <= 1e-10);
  MleOptions newton;
  newton.single_newton_step = true;
  CHECK(mle_refine(col, 0.01, h, h0, eps2, newton).sigma2 == doctest::Approx(0.04).epsilon(1e-8));
  CHECK_THROWS_AS(mle_refine(col, 0.0, h, h0, eps2), DomainError);
}
