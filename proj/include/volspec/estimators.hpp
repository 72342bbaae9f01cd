#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "volspec/curve.hpp"
#include "volspec/spectral.hpp"

namespace volspec {

enum class WeightMode { adaptive, oracle };
enum class BiasCorrection { paper, exact };
enum class SpotKernel { box, local_linear };
/// Pilot for adaptive weights: j = 1 responses only, or all J frequencies
/// combined with weights from a pooled variance.
enum class PilotMode { first_frequency, all_frequencies };

struct EstimatorConfig {
  BlockGrid grid{2, 1};
  std::size_t J = 1;
  double delta = 0.0;
  WeightMode weight_mode = WeightMode::adaptive;
  BiasCorrection bias_correction = BiasCorrection::paper;
  SpotKernel spot_kernel = SpotKernel::local_linear;
  double spot_bandwidth = 0.25;
  /// Adaptive weights of block k come from a pilot fit that leaves block k
  /// out, so w_jk does not depend on y_jk.
  bool pilot_leave_one_out = true;
  PilotMode pilot = PilotMode::all_frequencies;

  /// Spectral scale h0 = h sqrt(n) / delta; +inf when delta == 0.
  double h0() const;
  /// Throws ConfigError on J < 1, J > n*h, bandwidth <= 0, delta < 0.
  void validate() const;
};

struct SpotEstimate {
  std::vector<double> centers;
  std::vector<double> values;
  double bandwidth = 0.0;
};

/// Local-likelihood weights w^J_jk, stored j-major like SpectralCoefficients.
struct WeightMatrix {
  std::size_t J = 0;
  std::size_t K = 0;
  std::vector<double> values;

  double at(std::size_t j, std::size_t k) const { return values[(j - 1) * K + k]; }
};

struct IvEstimate {
  double iv_hat = 0.0;
  std::optional<double> asymptotic_sd;
  EstimatorConfig config;
};

/// Per-block unbiased spot responses r_k = pi^2 h^-2 (y0_1k)^2 - pi^2 delta^2/(n h^2).
std::vector<double> spot_responses(const SpectralCoefficients& stats);

/// Box-kernel spot estimate at t: average of r_k over blocks whose centre lies
/// within b of t. Throws EstimationError when the window is empty.
double spot_block_estimate(const SpectralCoefficients& stats, double t, double b);

/// Box-kernel estimate evaluated at every block centre. With `leave_one_out`
/// the value at centre k averages the other blocks of the window only.
SpotEstimate spot_box(const SpectralCoefficients& stats, double b, bool leave_one_out = false);
std::vector<double> box_smooth(std::span<const double> x, std::span<const double> y, double b,
                               bool leave_one_out = false);

/// Epanechnikov local-linear regression of r_k on block centres, evaluated at
/// every centre. Values are floored at `floor` (pass 0 to disable).
SpotEstimate spot_local_linear(const SpectralCoefficients& stats, double b, double floor = 0.0,
                               bool leave_one_out = false);
/// Same smoother on arbitrary responses (exposed for testing the regression).
std::vector<double> local_linear_smooth(std::span<const double> x, std::span<const double> y,
                                        double b, bool leave_one_out = false);

/// Spot estimate per `config.spot_kernel`, floored at
/// max(1e-3 * smallest positive value, 1e-8) so every entry is usable in weights.
SpotEstimate estimate_spot(const SpectralCoefficients& stats, const EstimatorConfig& config,
                           bool leave_one_out = false);

/// w^J_jk = (s_k + pi^2 j^2/h0^2)^-2 / sum_{l<=J} (s_k + pi^2 l^2/h0^2)^-2.
WeightMatrix compute_weights(std::span<const double> spot, double h0, std::size_t J);

/// Pilot spot variances for the adaptive weights, one per block, floored like
/// estimate_spot. In all_frequencies mode the response of block i is
/// sum_j v_j pi^2 j^2 h^-2 (y_ji^2 - delta^2/n), v the weights at the pooled
/// j = 1 variance; with leave_one_out nothing computed for block k reads block
/// k's statistics.
std::vector<double> pilot_spot(const SpectralCoefficients& stats, const EstimatorConfig& config);

/// compute_weights applied to pilot_spot.
WeightMatrix adaptive_weights(const SpectralCoefficients& stats, const EstimatorConfig& config);

/// Oracle weights: true sigma^2 at each block centre.
WeightMatrix oracle_weights(const VolatilityCurve& curve, const EstimatorConfig& config);

/// IV = sum_k h sum_j w_jk pi^2 j^2 h^-2 ((y0_jk)^2 - nu_jk), with
/// nu_jk = delta^2/n (paper) or the exact discrete noise variance (exact).
/// `table` is required in exact mode; `reference` fills asymptotic_sd.
IvEstimate estimate_iv(const SpectralCoefficients& stats, const WeightMatrix& weights,
                       const EstimatorConfig& config, const WeightTable* table = nullptr,
                       const VolatilityCurve* reference = nullptr);

/// End-to-end: spot pre-estimate (adaptive) or oracle weights from
/// `reference`, then estimate_iv.
IvEstimate estimate_iv(const SpectralCoefficients& stats, const EstimatorConfig& config,
                       const WeightTable* table = nullptr,
                       const VolatilityCurve* reference = nullptr);

/// n^{-1/4} sqrt(8 delta int sigma^3).
double asymptotic_sd(const VolatilityCurve& curve, double delta, std::size_t n);

/// ((int sigma^4)^{3/4} / int sigma^3)^{1/2}: RMSE of the best globally tuned
/// estimator relative to the efficient one.
double global_tuning_inefficiency(const VolatilityCurve& curve);

/// Cut-off rule J = min(ceil(2 sigma_max h/(pi delta)), n h), sigma_max the
/// grid maximum of sigma; at least 1. This is the rule exactly as commonly
/// printed; note it does not reproduce J = 43 for the n = 30000, delta = 0.01,
/// 30-block configuration, so callers normally set J explicitly.
std::size_t printed_cutoff_rule(const VolatilityCurve& curve, double delta, const BlockGrid& grid);

struct MleOptions {
  double damping = 0.5;
  std::size_t max_iterations = 100;
  double tolerance = 1e-10;
  /// iterates are kept in (0, upper_bound]
  double upper_bound = 1e6;
  /// one Newton step on the estimating equation instead of damped iteration
  bool single_newton_step = false;
};

struct MleResult {
  double sigma2 = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0.0;
};

/// Solves sigma2 = sum_j w_j(sigma2) pi^2 j^2 h^-2 (y_j^2 - eps^2) for one block
/// (`column` = y0_1k..y0_Jk) by damped fixed-point iteration from `init`.
MleResult mle_refine(std::span<const double> column, double init, double h, double h0,
                     double eps2, const MleOptions& options = {});

}  // namespace volspec
