#include "volspec/fisher.hpp"

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <numbers>

#include "volspec/errors.hpp"

namespace volspec {
namespace {

constexpr double kPi = std::numbers::pi;

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be > 0");
}

// S(l) = sum_j l^3/(l^2 + pi^2 j^2)^2
//      = sum_{m>=0} (-1)^m (m+1) zeta(2m+4) / pi^{2m+4} l^{2m+3},  |l| < pi
double series_small(double l) {
  const double l2 = l * l;
  double power = l * l2;
  double acc = 0.0;
  for (int m = 0; m < 60; ++m) {
    const double coeff = (m + 1) * boost::math::zeta(2.0 * m + 4.0) / std::pow(kPi, 2 * m + 4);
    const double term = (m % 2 == 0 ? 1.0 : -1.0) * coeff * power;
    acc += term;
    if (std::abs(term) <= 1e-18 * std::abs(acc)) break;
    power *= l2;
  }
  return acc;
}

double series_closed_form(double l) {
  const double e2 = std::exp(-2.0 * l);
  const double one_minus = -std::expm1(-2.0 * l);
  return (1.0 + 4.0 * l * e2 - e2 * e2) / (4.0 * one_minus * one_minus) - 1.0 / (2.0 * l);
}

double series_value(double l) { return l < 1.0 ? series_small(l) : series_closed_form(l); }

}  // namespace

double fisher_closed(double theta, double h0) {
  require_positive(theta, "theta");
  require_positive(h0, "h0");
  const double root = std::sqrt(theta);
  // I = h0/(8 theta^{3/2}) * 4 S(l) = h0 S(l) / (2 theta^{3/2})
  return h0 * series_value(root * h0) / (2.0 * theta * root);
}

double fisher_partial(double theta, double h0, std::size_t J) {
  require_positive(theta, "theta");
  require_positive(h0, "h0");
  if (J < 1) throw DomainError("fisher_partial: J must be >= 1");
  const double c = kPi * kPi / (h0 * h0);
  double acc = 0.0;
  for (std::size_t j = J; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double g = theta + c * jd * jd;
    acc += 0.5 / (g * g);
  }
  return acc;
}

double fisher_tail_bound(double h0, std::size_t J) {
  const double shifted = static_cast<double>(J) - 0.5;
  const double h2 = h0 * h0;
  return h2 * h2 / (2.0 * std::pow(kPi, 4)) / (3.0 * shifted * shifted * shifted);
}

FisherReport fisher_report(double theta, double h0, std::optional<std::size_t> J) {
  FisherReport r;
  r.theta = theta;
  r.h0 = h0;
  r.J = J;
  r.value_closed = fisher_closed(theta, h0);
  if (J) r.value_partial = fisher_partial(theta, h0, *J);
  r.lan_normalized = r.value_closed / h0;
  return r;
}

double SeriesIdentity::difference() const { return std::abs(lhs + tail - rhs); }

SeriesIdentity series_identity(double lambda, std::size_t J) {
  require_positive(lambda, "lambda");
  if (J < 1) throw DomainError("series_identity: J must be >= 1");
  SeriesIdentity s;
  s.lambda = lambda;
  s.J = J;
  const double l2 = lambda * lambda;
  const double l3 = l2 * lambda;
  const double pi2 = kPi * kPi;
  for (std::size_t j = J; j >= 1; --j) {
    const double jd = static_cast<double>(j);
    const double g = l2 + pi2 * jd * jd;
    s.lhs += l3 / (g * g);
  }
  const double shifted = static_cast<double>(J) - 0.5;
  s.tail = l3 / (3.0 * pi2 * pi2 * shifted * shifted * shifted);
  s.rhs = series_value(lambda);
  return s;
}

double single_frequency_information(double sigma0, double h0) {
  require_positive(sigma0, "sigma0");
  require_positive(h0, "h0");
  const double denom = kPi * kPi + h0 * h0 * sigma0 * sigma0;
  return h0 * h0 * h0 / (2.0 * denom * denom);
}

SingleFrequencyOptimum single_freq_optimum(double sigma0) {
  require_positive(sigma0, "sigma0");
  SingleFrequencyOptimum opt;
  opt.h0_star = std::sqrt(3.0) * kPi / sigma0;
  opt.info_star = std::pow(3.0, 1.5) / (32.0 * kPi) / (sigma0 * sigma0 * sigma0);
  opt.efficiency = std::sqrt(std::pow(3.0, 1.5) / (4.0 * kPi));
  return opt;
}

}  // namespace volspec
