#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "volspec/curve.hpp"

namespace volspec {

/// sigma(t) = 1 + 0.5 sin(2 pi t), tabulated on `knots` equispaced points.
VolatilityCurve sine_test_curve(std::size_t knots = 10001);

struct HellingerSuite {
  std::size_t pairs = 0;
  std::size_t general_violations = 0;
  std::size_t mean_only_violations = 0;
  std::size_t covariance_only_violations = 0;
  double max_general_ratio = 0.0;  ///< max exact / bound over the pairs
  std::size_t products = 0;
  std::size_t product_violations = 0;
  double max_product_ratio = 0.0;  ///< max H^2(product) / sum H^2(factors)
  /// 1-D closed forms against quadrature of int sqrt(pq)
  double scale_quadrature_error = 0.0;
  double shift_quadrature_error = 0.0;

  bool passed(double quadrature_tol = 1e-6) const {
    return general_violations == 0 && mean_only_violations == 0 &&
           covariance_only_violations == 0 && product_violations == 0 &&
           scale_quadrature_error <= quadrature_tol && shift_quadrature_error <= quadrature_tol;
  }
};

/// Random SPD pairs of dimension 1..max_dim, random block-diagonal products,
/// and 1-D scale / shift laws checked against numerical integration.
HellingerSuite verify_hellinger(std::size_t pairs, std::size_t max_dim, std::size_t products,
                                std::uint64_t seed);

struct RegressionDecayRow {
  std::size_t n = 0;
  double hellinger_sq = 0.0;
  double hs_bound = 0.0;  ///< 2 ||S^{-1/2}(S~ - S)S^{-1/2}||_HS^2
};

struct RegressionDecay {
  std::vector<RegressionDecayRow> rows;
  double slope = 0.0;  ///< least-squares slope of log H^2 against log n
  bool strictly_decreasing = false;
};

RegressionDecay verify_regression_bound(const VolatilityCurve& curve, double delta,
                                        const std::vector<std::size_t>& ns);

struct CounterexampleRow {
  std::size_t n = 0;
  double max_abs_deviation = 0.0;  ///< max_i |cell_variance(i, n) - 1/n|
};

std::vector<CounterexampleRow> verify_counterexample(const std::vector<std::size_t>& ns,
                                                     double alpha);

}  // namespace volspec
