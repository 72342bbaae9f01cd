#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "volspec/simulate.hpp"

namespace volspec {

/// Partition of [0,1] into K = 1/h blocks of n*h samples each.
class BlockGrid {
 public:
  /// Requires n divisible by `blocks` and at least two samples per block.
  BlockGrid(std::size_t n, std::size_t blocks);

  std::size_t n() const { return n_; }
  std::size_t blocks() const { return blocks_; }
  std::size_t samples_per_block() const { return n_ / blocks_; }
  double h() const { return 1.0 / static_cast<double>(blocks_); }
  double block_start(std::size_t k) const { return static_cast<double>(k) * h(); }
  double block_center(std::size_t k) const { return (static_cast<double>(k) + 0.5) * h(); }

  bool operator==(const BlockGrid&) const = default;

 private:
  std::size_t n_;
  std::size_t blocks_;
};

struct BasisValue {
  double phi;
  double Phi;
};

/// phi_jk(t) = sqrt(2/h) cos(j pi (t - kh)/h) and its antiderivative
/// Phi_jk(t) = sqrt(2h)/(pi j) sin(j pi (t - kh)/h) on [kh, (k+1)h], zero
/// elsewhere.
BasisValue basis_eval(std::size_t j, std::size_t k, double h, double t);

/// Full-length weight vector c_1..c_n with c_i = -n int_{cell i} Phi_jk, from
/// the closed-form antiderivative.
std::vector<double> discrete_weights(std::size_t j, std::size_t k, const BlockGrid& grid);

/// Weights for one block, shared by every block of the grid: row j-1 holds
/// c^{(j)}_1..c^{(j)}_B for the B cells of a block. Also carries the pieces of
/// the exact discrete noise variance. Immutable after construction.
class WeightTable {
 public:
  WeightTable(const BlockGrid& grid, std::size_t J);

  const BlockGrid& grid() const { return grid_; }
  std::size_t cutoff() const { return J_; }
  std::span<const double> matrix() const { return weights_; }
  std::span<const double> row(std::size_t j) const;

  /// Exact noise variance of y0_jk divided by delta^2: sum over the noise
  /// coefficients (c_m - c_{m+1}) within the block, plus c_1^2 for k >= 1
  /// where the previous block's last noisy sample enters the first increment.
  double noise_factor(std::size_t j, std::size_t k) const;

 private:
  BlockGrid grid_;
  std::size_t J_;
  std::vector<double> weights_;
  std::vector<double> interior_noise_;
  std::vector<double> first_weight_sq_;
};

/// Block statistics y0_jk, j = 1..J, k = 0..K-1, stored j-major.
struct SpectralCoefficients {
  std::size_t J = 0;
  BlockGrid grid{2, 1};
  double delta = 0.0;
  std::size_t n = 0;
  std::vector<double> values;

  double at(std::size_t j, std::size_t k) const { return values[(j - 1) * grid.blocks() + k]; }
  double& at(std::size_t j, std::size_t k) { return values[(j - 1) * grid.blocks() + k]; }
};

/// y0_jk = sum_i c_i (Y_i - Y_{i-1}) with Y_0 := 0.
SpectralCoefficients compute_spectral_stats(const ObservationSeries& obs, const BlockGrid& grid,
                                            std::size_t J);
SpectralCoefficients compute_spectral_stats(const ObservationSeries& obs, const WeightTable& table);
/// Raw form used by the Monte Carlo loop; `increments` is scratch of size n.
void compute_spectral_stats(std::span<const double> values, const WeightTable& table,
                            std::span<double> increments, std::span<double> out);

/// h^2 pi^-2 j^-2 sigma2 + eps^2
double theoretical_variance(double sigma2, std::size_t j, double h, double eps);

}  // namespace volspec
