#pragma once

#include <cstddef>
#include <optional>

namespace volspec {

/// Fisher information about theta carried by one block's frequencies
/// y_j ~ N(0, theta + pi^2 j^2 / h0^2), j >= 1:
///   I(theta) = sum_j 1 / (2 (theta + pi^2 j^2/h0^2)^2)
///            = h0 / (8 theta^{3/2}) [ (1 + 4 l e^{-2l} - e^{-4l}) / (1 - e^{-2l})^2 - 2/l ],
/// l = sqrt(theta) h0. For l < 1 the bracket is a difference of nearly equal
/// terms, so a Taylor series in l (zeta-function coefficients) is used there.
double fisher_closed(double theta, double h0);

/// sum_{j=1}^{J} 1 / (2 (theta + pi^2 j^2/h0^2)^2), summed from j = J down.
double fisher_partial(double theta, double h0, std::size_t J);

/// Upper bound on the neglected tail sum_{j>J}: h0^4 / (2 pi^4) / (3 (J - 1/2)^3).
double fisher_tail_bound(double h0, std::size_t J);

struct FisherReport {
  double theta = 0.0;
  double h0 = 0.0;
  std::optional<std::size_t> J;
  double value_closed = 0.0;
  std::optional<double> value_partial;
  /// I / h0; tends to 1/(8 theta^{3/2}) as h0 grows
  double lan_normalized = 0.0;
};

FisherReport fisher_report(double theta, double h0, std::optional<std::size_t> J = std::nullopt);

/// S(l) = sum_j l^3 / (l^2 + pi^2 j^2)^2 truncated at J, against its closed form.
struct SeriesIdentity {
  double lambda = 0.0;
  std::size_t J = 0;
  double lhs = 0.0;   ///< truncated sum
  double tail = 0.0;  ///< l^3 / (3 pi^4 (J - 1/2)^3)
  double rhs = 0.0;   ///< (1 + 4 l e^{-2l} - e^{-4l}) / (4 (1 - e^{-2l})^2) - 1/(2l)
  double difference() const;
};

SeriesIdentity series_identity(double lambda, std::size_t J);

/// Information of a single frequency per block: (2 h0)^-1 h0^4 / (pi^2 + h0^2 s0^2)^2.
double single_frequency_information(double sigma0, double h0);

struct SingleFrequencyOptimum {
  double h0_star = 0.0;     ///< sqrt(3) pi / sigma0
  double info_star = 0.0;   ///< 3^{3/2} / (32 pi) sigma0^-3
  double efficiency = 0.0;  ///< sqrt(info_star / (sigma0^-3 / 8))
};

SingleFrequencyOptimum single_freq_optimum(double sigma0);

}  // namespace volspec
