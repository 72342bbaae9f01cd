#include "volspec/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "volspec/errors.hpp"

namespace volspec {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPi2 = kPi * kPi;

double inverse_h0_squared(double h0) { return std::isinf(h0) ? 0.0 : 1.0 / (h0 * h0); }

// Weights for one block, written into w[0..J).
void block_weights(double sigma2, double inv_h0_sq, std::size_t J, double* w) {
  double total = 0.0;
  for (std::size_t j = J; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double g = sigma2 + kPi2 * jd * jd * inv_h0_sq;
    w[j - 1] = 1.0 / (g * g);
    total += w[j - 1];
  }
  for (std::size_t j = 0; j < J; ++j) w[j] /= total;
}

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double noise_level(const SpectralCoefficients& stats) {
  return stats.delta * stats.delta / static_cast<double>(stats.n);
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// Box average of y over points within b of x[e], skipping index `skip`.
double box_point(std::span<const double> x, std::span<const double> y, std::size_t e, double b,
                 std::size_t skip) {
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == skip) continue;
    if (std::abs(x[i] - x[e]) <= b * (1.0 + 1e-12)) {
      acc += y[i];
      ++count;
    }
  }
  if (count == 0)
    throw EstimationError("box smoother: no block centre within bandwidth of x=" + std::to_string(x[e]));
  return acc / static_cast<double>(count);
}

// Epanechnikov local-linear fit at x[e], skipping index `skip`.
double local_linear_point(std::span<const double> x, std::span<const double> y, std::size_t e,
                          double b, std::size_t skip) {
  double s0 = 0, s1 = 0, s2 = 0, t0 = 0, t1 = 0;
  std::size_t support = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - x[e];
    const double u = d / b;
    if (std::abs(u) >= 1.0 || i == skip) continue;
    const double w = 0.75 * (1.0 - u * u);
    s0 += w;
    s1 += w * d;
    s2 += w * d * d;
    t0 += w * y[i];
    t1 += w * d * y[i];
    ++support;
  }
  const double det = s0 * s2 - s1 * s1;
  if (support < 2 || !(det > 1e-12 * s0 * s2))
    throw EstimationError("local-linear: singular local design at x=" + std::to_string(x[e]) +
                          " (widen the bandwidth)");
  return (s2 * t0 - s1 * t1) / det;
}

// Same floor as estimate_spot.
void apply_spot_floor(std::vector<double>& values) {
  double smallest = std::numeric_limits<double>::infinity();
  for (double v : values)
    if (v > 0.0) smallest = std::min(smallest, v);
  const double floor = std::isinf(smallest) ? 1e-8 : std::max(1e-3 * smallest, 1e-8);
  for (double& v : values) v = std::max(v, floor);
}

}  // namespace

double EstimatorConfig::h0() const {
  if (delta == 0.0) return std::numeric_limits<double>::infinity();
  return grid.h() * std::sqrt(static_cast<double>(grid.n())) / delta;
}

void EstimatorConfig::validate() const {
  if (J < 1) throw ConfigError("estimator: J must be >= 1");
  if (J > grid.samples_per_block())
    throw ConfigError("estimator: J=" + std::to_string(J) + " exceeds n*h=" +
                      std::to_string(grid.samples_per_block()));
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("estimator: delta must be >= 0");
  if (!(spot_bandwidth > 0.0)) throw ConfigError("estimator: spot bandwidth must be > 0");
}

std::vector<double> spot_responses(const SpectralCoefficients& stats) {
  const std::size_t K = stats.grid.blocks();
  const double h = stats.grid.h();
  const double scale = kPi2 / (h * h);
  const double noise = scale * noise_level(stats);
  std::vector<double> r(K);
  for (std::size_t k = 0; k < K; ++k) {
    const double y = stats.at(1, k);
    r[k] = scale * y * y - noise;
  }
  return r;
}

double spot_block_estimate(const SpectralCoefficients& stats, double t, double b) {
  if (!(b > 0.0)) throw DomainError("spot estimate: bandwidth must be > 0");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("spot estimate: t outside [0,1]");
  if (stats.J < 1) throw ConfigError("spot estimate: statistics lack frequency j=1");
  const auto r = spot_responses(stats);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (std::abs(stats.grid.block_center(k) - t) <= b * (1.0 + 1e-12)) {
      acc += r[k];
      ++count;
    }
  }
  if (count == 0) throw EstimationError("spot estimate: no block centre within bandwidth of t");
  return acc / static_cast<double>(count);
}

std::vector<double> box_smooth(std::span<const double> x, std::span<const double> y, double b,
                               bool leave_one_out) {
  if (x.size() != y.size()) throw ConfigError("box smoother: x/y length mismatch");
  if (!(b > 0.0)) throw DomainError("box smoother: bandwidth must be > 0");
  std::vector<double> fitted(x.size());
  for (std::size_t e = 0; e < x.size(); ++e) fitted[e] = box_point(x, y, e, b, leave_one_out ? e : kNone);
  return fitted;
}

SpotEstimate spot_box(const SpectralCoefficients& stats, double b, bool leave_one_out) {
  if (stats.J < 1) throw ConfigError("spot estimate: statistics lack frequency j=1");
  SpotEstimate est;
  est.bandwidth = b;
  for (std::size_t k = 0; k < stats.grid.blocks(); ++k) est.centers.push_back(stats.grid.block_center(k));
  est.values = box_smooth(est.centers, spot_responses(stats), b, leave_one_out);
  return est;
}

std::vector<double> local_linear_smooth(std::span<const double> x, std::span<const double> y,
                                        double b, bool leave_one_out) {
  if (x.size() != y.size()) throw ConfigError("local-linear: x/y length mismatch");
  if (!(b > 0.0)) throw DomainError("local-linear: bandwidth must be > 0");
  std::vector<double> fitted(x.size());
  for (std::size_t e = 0; e < x.size(); ++e)
    fitted[e] = local_linear_point(x, y, e, b, leave_one_out ? e : kNone);
  return fitted;
}

SpotEstimate spot_local_linear(const SpectralCoefficients& stats, double b, double floor,
                               bool leave_one_out) {
  SpotEstimate est;
  est.bandwidth = b;
  for (std::size_t k = 0; k < stats.grid.blocks(); ++k) est.centers.push_back(stats.grid.block_center(k));
  const auto r = spot_responses(stats);
  est.values = local_linear_smooth(est.centers, r, b, leave_one_out);
  for (double& v : est.values) v = std::max(v, floor);
  return est;
}

SpotEstimate estimate_spot(const SpectralCoefficients& stats, const EstimatorConfig& config,
                           bool leave_one_out) {
  SpotEstimate est = config.spot_kernel == SpotKernel::box
                         ? spot_box(stats, config.spot_bandwidth, leave_one_out)
                         : spot_local_linear(stats, config.spot_bandwidth, 0.0, leave_one_out);
  apply_spot_floor(est.values);
  return est;
}

WeightMatrix compute_weights(std::span<const double> spot, double h0, std::size_t J) {
  if (J < 1) throw ConfigError("weights: J must be >= 1");
  if (!(h0 > 0.0)) throw DomainError("weights: h0 must be > 0");
  WeightMatrix w;
  w.J = J;
  w.K = spot.size();
  w.values.resize(J * w.K);
  const double inv = inverse_h0_squared(h0);
  std::vector<double> column(J);
  for (std::size_t k = 0; k < w.K; ++k) {
    if (!(spot[k] > 0.0) || !std::isfinite(spot[k]))
      throw DomainError("weights: spot variance must be positive, got " + std::to_string(spot[k]) +
                        " at block " + std::to_string(k));
    block_weights(spot[k], inv, J, column.data());
    for (std::size_t j = 0; j < J; ++j) w.values[j * w.K + k] = column[j];
  }
  return w;
}

std::vector<double> pilot_spot(const SpectralCoefficients& stats, const EstimatorConfig& config) {
  if (config.pilot == PilotMode::first_frequency)
    return estimate_spot(stats, config, config.pilot_leave_one_out).values;

  const std::size_t K = stats.grid.blocks();
  const std::size_t J = stats.J;
  const double h = stats.grid.h();
  const double nu = noise_level(stats);
  const double inv = inverse_h0_squared(config.h0());
  std::vector<double> centers(K);
  for (std::size_t k = 0; k < K; ++k) centers[k] = stats.grid.block_center(k);
  const auto first = spot_responses(stats);
  // per-frequency unbiased responses pi^2 j^2 h^-2 (y_jk^2 - nu), j-major
  std::vector<double> per_freq(J * K);
  for (std::size_t j = 1; j <= J; ++j) {
    const double scale = kPi2 * static_cast<double>(j * j) / (h * h);
    for (std::size_t k = 0; k < K; ++k) {
      const double y = stats.at(j, k);
      per_freq[(j - 1) * K + k] = scale * (y * y - nu);
    }
  }
  std::vector<double> v(J), combined(K), out(K);
  auto fit = [&](std::size_t target, std::size_t skip) {
    double pooled = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < K; ++i)
      if (i != skip) pooled += first[i], ++count;
    pooled = std::max(pooled / static_cast<double>(std::max<std::size_t>(count, 1)), 1e-8);
    block_weights(pooled, inv, J, v.data());
    for (std::size_t i = 0; i < K; ++i) {
      double acc = 0.0;
      for (std::size_t j = J; j >= 1; --j) acc += v[j - 1] * per_freq[(j - 1) * K + i];
      combined[i] = acc;
    }
    return config.spot_kernel == SpotKernel::box
               ? box_point(centers, combined, target, config.spot_bandwidth, skip)
               : local_linear_point(centers, combined, target, config.spot_bandwidth, skip);
  };
  for (std::size_t k = 0; k < K; ++k) out[k] = fit(k, config.pilot_leave_one_out ? k : kNone);
  apply_spot_floor(out);
  return out;
}

WeightMatrix adaptive_weights(const SpectralCoefficients& stats, const EstimatorConfig& config) {
  return compute_weights(pilot_spot(stats, config), config.h0(), config.J);
}

WeightMatrix oracle_weights(const VolatilityCurve& curve, const EstimatorConfig& config) {
  std::vector<double> spot(config.grid.blocks());
  for (std::size_t k = 0; k < spot.size(); ++k) spot[k] = curve.sigma2(config.grid.block_center(k));
  return compute_weights(spot, config.h0(), config.J);
}

IvEstimate estimate_iv(const SpectralCoefficients& stats, const WeightMatrix& weights,
                       const EstimatorConfig& config, const WeightTable* table,
                       const VolatilityCurve* reference) {
  const std::size_t K = stats.grid.blocks();
  if (weights.J != stats.J || weights.K != K)
    throw ConfigError("estimate_iv: weight matrix " + std::to_string(weights.J) + "x" +
                      std::to_string(weights.K) + " does not match statistics " +
                      std::to_string(stats.J) + "x" + std::to_string(K));
  const bool exact = config.bias_correction == BiasCorrection::exact;
  if (exact && (table == nullptr || !(table->grid() == stats.grid) || table->cutoff() < stats.J))
    throw ConfigError("estimate_iv: exact bias correction needs the grid's weight table");

  const double h = stats.grid.h();
  const double delta2 = stats.delta * stats.delta;
  const double paper_nu = noise_level(stats);
  KahanSum total;
  for (std::size_t k = 0; k < K; ++k) {
    double block = 0.0;
    for (std::size_t j = stats.J; j >= 1; --j) {
      const double y = stats.at(j, k);
      const double nu = exact ? delta2 * table->noise_factor(j, k) : paper_nu;
      const double jd = static_cast<double>(j);
      block += weights.at(j, k) * kPi2 * jd * jd / h * (y * y - nu);
    }
    total.add(block);
  }
  IvEstimate est;
  est.iv_hat = total.sum;
  est.config = config;
  if (reference != nullptr) est.asymptotic_sd = asymptotic_sd(*reference, stats.delta, stats.n);
  return est;
}

IvEstimate estimate_iv(const SpectralCoefficients& stats, const EstimatorConfig& config,
                       const WeightTable* table, const VolatilityCurve* reference) {
  config.validate();
  if (!(config.grid == stats.grid) || config.J != stats.J)
    throw ConfigError("estimate_iv: configuration grid/J does not match the statistics");
  WeightMatrix weights;
  if (config.weight_mode == WeightMode::oracle) {
    if (reference == nullptr) throw ConfigError("estimate_iv: oracle weights need the true curve");
    weights = oracle_weights(*reference, config);
  } else {
    weights = adaptive_weights(stats, config);
  }
  return estimate_iv(stats, weights, config, table, reference);
}

double asymptotic_sd(const VolatilityCurve& curve, double delta, std::size_t n) {
  if (n < 1) throw DomainError("asymptotic_sd: n must be >= 1");
  return std::pow(static_cast<double>(n), -0.25) * std::sqrt(8.0 * delta * curve.integral_sigma_power(3.0));
}

double global_tuning_inefficiency(const VolatilityCurve& curve) {
  return std::sqrt(std::pow(curve.integral_sigma_power(4.0), 0.75) / curve.integral_sigma_power(3.0));
}

std::size_t printed_cutoff_rule(const VolatilityCurve& curve, double delta, const BlockGrid& grid) {
  const std::size_t cap = grid.samples_per_block();
  if (delta == 0.0) return cap;
  const double sigma_max = std::sqrt(curve.grid_max_sigma2());
  const double raw = std::ceil(2.0 * sigma_max * grid.h() / (kPi * delta));
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)), 1, cap);
}

MleResult mle_refine(std::span<const double> column, double init, double h, double h0,
                     double eps2, const MleOptions& options) {
  if (!(init > 0.0)) throw DomainError("mle_refine: initial value must be > 0");
  if (column.empty()) throw ConfigError("mle_refine: empty block column");
  const std::size_t J = column.size();
  const double inv = inverse_h0_squared(h0);
  std::vector<double> terms(J), w(J);
  for (std::size_t j = 1; j <= J; ++j) {
    const double jd = static_cast<double>(j);
    terms[j - 1] = kPi2 * jd * jd / (h * h) * (column[j - 1] * column[j - 1] - eps2);
  }
  // right-hand side of the estimating equation and its derivative in sigma2
  auto rhs = [&](double s, double* derivative) {
    block_weights(s, inv, J, w.data());
    double value = 0.0, mean_inv_g = 0.0;
    for (std::size_t j = J; j >= 1; --j) {
      const double jd = static_cast<double>(j);
      value += w[j - 1] * terms[j - 1];
      mean_inv_g += w[j - 1] / (s + kPi2 * jd * jd * inv);
    }
    if (derivative != nullptr) {
      double d = 0.0;
      for (std::size_t j = 1; j <= J; ++j) {
        const double jd = static_cast<double>(j);
        const double g = s + kPi2 * jd * jd * inv;
        d += w[j - 1] * (-2.0 / g + 2.0 * mean_inv_g) * terms[j - 1];
      }
      *derivative = d;
    }
    return value;
  };
  auto in_range = [&](double s) { return s > 0.0 && s <= options.upper_bound; };
  auto project = [&](double s) {
    return std::clamp(s, std::numeric_limits<double>::min(), options.upper_bound);
  };

  MleResult result;
  double s = init;
  if (options.single_newton_step) {
    double slope = 0.0;
    const double f = rhs(s, &slope);
    const double next = s - (f - s) / (slope - 1.0);
    result.iterations = 1;
    result.converged = std::isfinite(next) && in_range(next);
    result.sigma2 = result.converged ? next : project(next);
    result.residual = rhs(result.sigma2, nullptr) - result.sigma2;
    return result;
  }
  for (std::size_t it = 0; it <= options.max_iterations; ++it) {
    const double f = rhs(s, nullptr);
    result.residual = f - s;
    result.iterations = it;
    if (std::abs(result.residual) <= options.tolerance * std::max(1.0, s)) {
      // final undamped evaluation; exact when the weights do not depend on s
      result.converged = in_range(f);
      result.sigma2 = result.converged ? f : s;
      return result;
    }
    if (it == options.max_iterations) break;
    const double next = (1.0 - options.damping) * s + options.damping * f;
    if (!std::isfinite(next) || !in_range(next)) {
      result.sigma2 = project(next);
      result.converged = false;
      result.iterations = it + 1;
      return result;
    }
    s = next;
  }
  result.sigma2 = s;
  result.converged = false;
  return result;
}

}  // namespace volspec
