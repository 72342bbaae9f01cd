#include "volspec/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "volspec/errors.hpp"
#include "volspec/simd.hpp"

namespace volspec {
namespace {

constexpr double kPi = std::numbers::pi;

// c_m for m = 1..B within a block:
//   n sqrt(2h) h / (pi j)^2 * (cos(j pi m/B) - cos(j pi (m-1)/B))
// written as a product of sines, which has no cancellation for large B.
double block_weight(std::size_t j, std::size_t m, const BlockGrid& grid) {
  const double h = grid.h();
  const double n = static_cast<double>(grid.n());
  const auto B = static_cast<std::int64_t>(grid.samples_per_block());
  const auto jj = static_cast<std::int64_t>(j);
  const double scale = n * std::sqrt(2.0 * h) * h / (kPi * kPi * static_cast<double>(j * j));
  return -2.0 * scale * sin_pi_ratio(jj * (2 * static_cast<std::int64_t>(m) - 1), 2 * B) *
         sin_pi_ratio(jj, 2 * B);
}

}  // namespace

BlockGrid::BlockGrid(std::size_t n, std::size_t blocks) : n_(n), blocks_(blocks) {
  if (blocks == 0) throw ConfigError("block grid: number of blocks must be >= 1");
  if (n % blocks != 0)
    throw ConfigError("block grid: n=" + std::to_string(n) + " is not a multiple of blocks=" +
                      std::to_string(blocks));
  if (n / blocks < 2) throw ConfigError("block grid: need at least two samples per block");
}

BasisValue basis_eval(std::size_t j, std::size_t k, double h, double t) {
  if (j < 1) throw DomainError("basis_eval: frequency j must be >= 1");
  if (!(h > 0.0)) throw DomainError("basis_eval: h must be positive");
  const double start = static_cast<double>(k) * h;
  if (t < start || t > start + h) return {0.0, 0.0};
  const double arg = static_cast<double>(j) * kPi * (t - start) / h;
  return {std::sqrt(2.0 / h) * std::cos(arg),
          std::sqrt(2.0 * h) / (kPi * static_cast<double>(j)) * std::sin(arg)};
}

std::vector<double> discrete_weights(std::size_t j, std::size_t k, const BlockGrid& grid) {
  if (j < 1) throw DomainError("discrete_weights: frequency j must be >= 1");
  if (k >= grid.blocks()) throw DomainError("discrete_weights: block index out of range");
  std::vector<double> c(grid.n(), 0.0);
  const std::size_t B = grid.samples_per_block();
  for (std::size_t m = 1; m <= B; ++m) c[k * B + m - 1] = block_weight(j, m, grid);
  return c;
}

WeightTable::WeightTable(const BlockGrid& grid, std::size_t J)
    : grid_(grid), J_(J), interior_noise_(J), first_weight_sq_(J) {
  const std::size_t B = grid.samples_per_block();
  if (J < 1) throw ConfigError("spectral cut-off J must be >= 1");
  if (J > B)
    throw ConfigError("spectral cut-off J=" + std::to_string(J) +
                      " exceeds the block sample size n*h=" + std::to_string(B));
  weights_.resize(J * B);
  for (std::size_t j = 1; j <= J; ++j) {
    double* row = weights_.data() + (j - 1) * B;
    for (std::size_t m = 1; m <= B; ++m) row[m - 1] = block_weight(j, m, grid);
    double acc = 0.0;
    for (std::size_t m = 0; m < B; ++m) {
      const double next = m + 1 < B ? row[m + 1] : 0.0;
      const double d = row[m] - next;
      acc += d * d;
    }
    interior_noise_[j - 1] = acc;
    first_weight_sq_[j - 1] = row[0] * row[0];
  }
}

std::span<const double> WeightTable::row(std::size_t j) const {
  const std::size_t B = grid_.samples_per_block();
  return std::span<const double>(weights_).subspan((j - 1) * B, B);
}

double WeightTable::noise_factor(std::size_t j, std::size_t k) const {
  return interior_noise_[j - 1] + (k >= 1 ? first_weight_sq_[j - 1] : 0.0);
}

void compute_spectral_stats(std::span<const double> values, const WeightTable& table,
                            std::span<double> increments, std::span<double> out) {
  const BlockGrid& grid = table.grid();
  const std::size_t B = grid.samples_per_block();
  const std::size_t K = grid.blocks();
  const std::size_t J = table.cutoff();
  if (values.size() != grid.n() || increments.size() != grid.n())
    throw ConfigError("spectral statistics: observation length does not match grid n");
  if (out.size() != J * K) throw ConfigError("spectral statistics: output size mismatch");

  simd::first_difference(values, 0.0, increments);
  std::vector<double> column(J);
  for (std::size_t k = 0; k < K; ++k) {
    simd::gemv(table.matrix(), J, B, increments.subspan(k * B, B), column);
    for (std::size_t j = 0; j < J; ++j) out[j * K + k] = column[j];
  }
}

SpectralCoefficients compute_spectral_stats(const ObservationSeries& obs, const WeightTable& table) {
  const BlockGrid& grid = table.grid();
  if (obs.n != grid.n() || obs.values.size() != obs.n)
    throw ConfigError("spectral statistics: series length " + std::to_string(obs.values.size()) +
                      " does not match grid n=" + std::to_string(grid.n()));
  SpectralCoefficients stats;
  stats.J = table.cutoff();
  stats.grid = grid;
  stats.delta = obs.delta;
  stats.n = obs.n;
  stats.values.resize(stats.J * grid.blocks());
  std::vector<double> increments(obs.n);
  compute_spectral_stats(obs.values, table, increments, stats.values);
  return stats;
}

SpectralCoefficients compute_spectral_stats(const ObservationSeries& obs, const BlockGrid& grid,
                                            std::size_t J) {
  if (obs.n != grid.n())
    throw ConfigError("spectral statistics: series n=" + std::to_string(obs.n) +
                      " does not match grid n=" + std::to_string(grid.n()));
  return compute_spectral_stats(obs, WeightTable(grid, J));
}

double theoretical_variance(double sigma2, std::size_t j, double h, double eps) {
  const double jd = static_cast<double>(j);
  return h * h * sigma2 / (kPi * kPi * jd * jd) + eps * eps;
}

}  // namespace volspec
