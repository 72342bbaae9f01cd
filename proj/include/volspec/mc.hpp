#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "volspec/curve.hpp"
#include "volspec/estimators.hpp"

namespace volspec {

struct McConfig {
  std::string curve_spec;  ///< textual form, echoed in reports
  VolatilityCurve curve = VolatilityCurve::constant(1.0);
  std::size_t n = 30000;
  double delta = 0.01;
  std::size_t blocks = 30;
  std::size_t J = 43;
  std::size_t reps = 2000;
  std::uint64_t base_seed = 20240501;
  WeightMode weight_mode = WeightMode::adaptive;
  BiasCorrection bias_correction = BiasCorrection::paper;
  SpotKernel spot_kernel = SpotKernel::local_linear;
  double spot_bandwidth = 0.25;
  bool pilot_leave_one_out = true;
  PilotMode pilot = PilotMode::all_frequencies;
  /// 0: VOLSPEC_THREADS if set, else hardware concurrency
  unsigned threads = 0;

  EstimatorConfig estimator_config() const;
  /// Throws ConfigError for an invalid curve/grid/estimator combination.
  void validate() const;
};

struct McReport {
  std::size_t reps = 0;
  double true_value = 0.0;
  double asymptotic_sd = 0.0;
  double mean = 0.0;
  double bias = 0.0;
  double sd = 0.0;
  double rmse = 0.0;
  double rmse_over_asymptotic = 0.0;
  double q05 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q95 = 0.0;
  double wall_time = 0.0;  ///< seconds; not part of the JSON report
  std::vector<double> samples;
};

/// Pure 64-bit mix of (base_seed, replicate): every replicate owns its stream.
std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t replicate);

/// Summary statistics in replicate order (compensated sums). sd uses the
/// (reps-1) denominator (0 for one sample); quantiles interpolate order
/// statistics linearly. `asymptotic_sd` <= 0 leaves the ratio at 0.
McReport summarize(std::span<const double> samples, double true_value, double asymptotic_sd);

/// Simulate, estimate and summarise `config.reps` replicates. Replicates run
/// concurrently into indexed slots, so the report does not depend on the
/// thread count.
McReport run_mc(const McConfig& config);

/// Adaptive- and oracle-weight estimates computed on the same simulated paths.
struct PairedMcReport {
  McReport adaptive;
  McReport oracle;
  /// standard error of rmse(oracle) - rmse(adaptive) (delta method on the
  /// paired squared errors)
  double rmse_difference_se = 0.0;
};

PairedMcReport run_mc_paired(const McConfig& config);

/// Thread count for a hint (0 = VOLSPEC_THREADS or hardware concurrency).
unsigned resolve_threads(unsigned hint);

}  // namespace volspec
