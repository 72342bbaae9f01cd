#include "volspec/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "volspec/errors.hpp"
#include "volspec/simulate.hpp"
#include "volspec/spectral.hpp"

namespace volspec {
namespace {

struct Kahan {
  double sum = 0.0, carry = 0.0;
  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Runs body(r) for r in [0, reps) on `threads` workers; first exception wins.
template <class Body>
void parallel_for(std::size_t reps, unsigned threads, Body&& body) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    try {
      for (std::size_t r = next++; r < reps; r = next++) body(r);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = reps;
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(reps)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < count; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// Per-replicate estimates for each requested weight mode on one shared path.
struct Replicator {
  const McConfig& config;
  EstimatorConfig est;
  ObservationSimulator simulator;
  WeightTable table;
  WeightMatrix oracle;

  explicit Replicator(const McConfig& c)
      : config(c),
        est(c.estimator_config()),
        simulator(c.curve, c.n, c.delta),
        table(est.grid, c.J),
        oracle(oracle_weights(c.curve, est)) {}

  void run(std::size_t r, double* adaptive, double* oracle_out) const {
    std::vector<double> values(config.n), increments(config.n);
    simulator.simulate_into(substream_seed(config.base_seed, r), values);
    SpectralCoefficients stats;
    stats.J = config.J;
    stats.grid = est.grid;
    stats.delta = config.delta;
    stats.n = config.n;
    stats.values.resize(config.J * est.grid.blocks());
    compute_spectral_stats(values, table, increments, stats.values);
    if (adaptive != nullptr) {
      *adaptive = estimate_iv(stats, adaptive_weights(stats, est), est, &table).iv_hat;
    }
    if (oracle_out != nullptr) *oracle_out = estimate_iv(stats, oracle, est, &table).iv_hat;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

EstimatorConfig McConfig::estimator_config() const {
  EstimatorConfig est;
  est.grid = BlockGrid(n, blocks);
  est.J = J;
  est.delta = delta;
  est.weight_mode = weight_mode;
  est.bias_correction = bias_correction;
  est.spot_kernel = spot_kernel;
  est.spot_bandwidth = spot_bandwidth;
  est.pilot_leave_one_out = pilot_leave_one_out;
  est.pilot = pilot;
  return est;
}

void McConfig::validate() const {
  if (reps < 1) throw ConfigError("mc: reps must be >= 1");
  if (n < 1) throw ConfigError("mc: n must be >= 1");
  estimator_config().validate();
}

std::uint64_t substream_seed(std::uint64_t base_seed, std::uint64_t replicate) {
  return splitmix64(base_seed + splitmix64(replicate + 0x9E3779B97F4A7C15ULL));
}

McReport summarize(std::span<const double> samples, double true_value, double asymptotic_sd) {
  if (samples.empty()) throw ConfigError("summarize: no samples");
  McReport rep;
  rep.reps = samples.size();
  rep.true_value = true_value;
  rep.asymptotic_sd = asymptotic_sd;
  rep.samples.assign(samples.begin(), samples.end());
  const double count = static_cast<double>(samples.size());

  Kahan sum;
  for (double v : samples) sum.add(v);
  rep.mean = sum.sum / count;
  rep.bias = rep.mean - true_value;

  Kahan centered, squared_error;
  for (double v : samples) {
    centered.add((v - rep.mean) * (v - rep.mean));
    squared_error.add((v - true_value) * (v - true_value));
  }
  rep.sd = samples.size() >= 2 ? std::sqrt(centered.sum / (count - 1.0)) : 0.0;
  rep.rmse = std::sqrt(squared_error.sum / count);
  rep.rmse_over_asymptotic = asymptotic_sd > 0.0 ? rep.rmse / asymptotic_sd : 0.0;

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  rep.q05 = quantile(sorted, 0.05);
  rep.q25 = quantile(sorted, 0.25);
  rep.q50 = quantile(sorted, 0.50);
  rep.q75 = quantile(sorted, 0.75);
  rep.q95 = quantile(sorted, 0.95);
  return rep;
}

unsigned resolve_threads(unsigned hint) {
  if (hint > 0) return hint;
  if (const char* env = std::getenv("VOLSPEC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

McReport run_mc(const McConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Replicator rep(config);
  std::vector<double> estimates(config.reps);
  const bool oracle = config.weight_mode == WeightMode::oracle;
  parallel_for(config.reps, resolve_threads(config.threads), [&](std::size_t r) {
    rep.run(r, oracle ? nullptr : &estimates[r], oracle ? &estimates[r] : nullptr);
  });
  McReport report = summarize(estimates, config.curve.integral_sigma_power(2.0),
                              asymptotic_sd(config.curve, config.delta, config.n));
  report.wall_time = seconds_since(start);
  return report;
}

PairedMcReport run_mc_paired(const McConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Replicator rep(config);
  std::vector<double> adaptive(config.reps), oracle(config.reps);
  parallel_for(config.reps, resolve_threads(config.threads),
               [&](std::size_t r) { rep.run(r, &adaptive[r], &oracle[r]); });
  const double truth = config.curve.integral_sigma_power(2.0);
  const double asd = asymptotic_sd(config.curve, config.delta, config.n);
  PairedMcReport out{summarize(adaptive, truth, asd), summarize(oracle, truth, asd), 0.0};

  // d_r = e_o^2 / (2 rmse_o) - e_a^2 / (2 rmse_a) linearises rmse_o - rmse_a
  const double count = static_cast<double>(config.reps);
  std::vector<double> d(config.reps);
  Kahan mean_d;
  for (std::size_t r = 0; r < config.reps; ++r) {
    const double eo = oracle[r] - truth, ea = adaptive[r] - truth;
    d[r] = eo * eo / (2.0 * out.oracle.rmse) - ea * ea / (2.0 * out.adaptive.rmse);
    mean_d.add(d[r]);
  }
  const double md = mean_d.sum / count;
  Kahan var_d;
  for (double v : d) var_d.add((v - md) * (v - md));
  out.rmse_difference_se = config.reps >= 2 ? std::sqrt(var_d.sum / (count - 1.0) / count) : 0.0;
  const double elapsed = seconds_since(start);
  out.adaptive.wall_time = elapsed;
  out.oracle.wall_time = elapsed;
  return out;
}

}  // namespace volspec
