#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

namespace volspec {

struct ConstantCurve {
  double sigma;
  bool operator==(const ConstantCurve&) const = default;
};

/// sigma(t) = a + b (t - c)^4
struct ShiftedQuarticCurve {
  double a, b, c;
  bool operator==(const ShiftedQuarticCurve&) const = default;
};

/// sigma^2(t) = 1 + n_freq^{-alpha} cos(pi n_freq t)
struct CosinePerturbationCurve {
  std::int64_t n_freq;
  double alpha;
  bool operator==(const CosinePerturbationCurve&) const = default;
};

struct Knot {
  double t;
  double sigma;
  bool operator==(const Knot&) const = default;
};

/// sigma linearly interpolated between knots (t strictly increasing, first
/// knot at 0, last at 1).
struct TabulatedCurve {
  std::vector<Knot> knots;
  bool operator==(const TabulatedCurve&) const = default;
};

using CurveParams = std::variant<ConstantCurve, ShiftedQuarticCurve,
                                 CosinePerturbationCurve, TabulatedCurve>;

/// A deterministic volatility curve sigma(t) on [0,1].
///
/// Construction validates sigma(t) > 0 on a 10^4-point grid plus the knots of
/// tabulated curves. `tabulated_unchecked` skips that guard so tests can build
/// degenerate (e.g. zero) curves.
class VolatilityCurve {
 public:
  static VolatilityCurve constant(double sigma);
  static VolatilityCurve shifted_quartic(double a, double b, double c);
  static VolatilityCurve cosine_perturbation(std::int64_t n_freq, double alpha);
  static VolatilityCurve tabulated(std::vector<Knot> knots);
  static VolatilityCurve tabulated_unchecked(std::vector<Knot> knots);

  const CurveParams& params() const { return params_; }

  /// sigma(t); t must lie in [0,1].
  double sigma(double t) const;
  /// sigma^2(t); t must lie in [0,1].
  double sigma2(double t) const;

  /// int_{t0}^{t1} sigma^2(s) ds for 0 <= t0 <= t1 <= 1, in closed form.
  double integrated_variance(double t0, double t1) const;

  /// int_{(i-1)/n}^{i/n} sigma^2, 1 <= i <= n.
  double cell_variance(std::size_t i, std::size_t n) const;

  /// int_0^1 sigma^p(t) dt (p > 0). Closed form where available, adaptive
  /// Gauss-Kronrod otherwise.
  double integral_sigma_power(double p) const;

  /// min / max of sigma^2 over an equispaced grid of `resolution`+1 points.
  double grid_min_sigma2(std::size_t resolution = 10000) const;
  double grid_max_sigma2(std::size_t resolution = 10000) const;

  friend bool operator==(const VolatilityCurve& a, const VolatilityCurve& b) {
    return a.params_ == b.params_;
  }

 private:
  explicit VolatilityCurve(CurveParams params);
  void build_cumulative();
  void check_positive() const;

  CurveParams params_;
  // tabulated kind: running integral of sigma^2 at each knot
  std::vector<double> cumulative_;
};

double eval_sigma2(const VolatilityCurve& curve, double t);
double cell_variance(const VolatilityCurve& curve, std::size_t i, std::size_t n);

/// sigma_n^2(t) = 1 + n^{-alpha} cos(pi n t): on the grid i/n its increments
/// are i.i.d. N(0, 1/n), exactly like Brownian motion. Requires alpha in (0,1).
VolatilityCurve counterexample_curve(std::int64_t n_freq, double alpha);

/// sin(pi * num / den) with exact zeros at integer multiples of pi.
double sin_pi_ratio(std::int64_t num, std::int64_t den);
/// cos(pi * num / den) with exact zeros/ones at multiples of pi/2.
double cos_pi_ratio(std::int64_t num, std::int64_t den);

}  // namespace volspec
