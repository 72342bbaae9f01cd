#include "volspec/curve.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "volspec/errors.hpp"

namespace volspec {
namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void check_unit_time(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    std::ostringstream msg;
    msg << "time " << t << " outside [0,1]";
    throw DomainError(msg.str());
  }
}

// (u1^m - u0^m) computed as du * sum u1^r u0^(m-1-r) to avoid cancellation
double power_difference(double u1, double u0, int m, double du) {
  double acc = 0.0;
  double p1 = 1.0;
  for (int r = 0; r < m; ++r) {
    acc += p1 * std::pow(u0, m - 1 - r);
    p1 *= u1;
  }
  return du * acc;
}

double quartic_integral(const ShiftedQuarticCurve& q, double t0, double t1, double dt) {
  const double u0 = t0 - q.c;
  const double u1 = t1 - q.c;
  return q.a * q.a * dt + 0.4 * q.a * q.b * power_difference(u1, u0, 5, dt) +
         q.b * q.b / 9.0 * power_difference(u1, u0, 9, dt);
}

double cosine_amplitude(const CosinePerturbationCurve& c) {
  return std::pow(static_cast<double>(c.n_freq), -c.alpha);
}

// int_0^x (s0 + slope*y)^2 dy
double linear_sq_integral(double s0, double slope, double x) {
  return s0 * s0 * x + s0 * slope * x * x + slope * slope * x * x * x / 3.0;
}

double adaptive_integral(const auto& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-14);
}

}  // namespace

double sin_pi_ratio(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw DomainError("sin_pi_ratio: denominator must be positive");
  const std::int64_t period = 2 * den;
  std::int64_t r = num % period;
  if (r < 0) r += period;
  double sign = 1.0;
  if (r >= den) {
    r -= den;
    sign = -1.0;
  }
  if (r == 0) return 0.0;
  if (2 * r > den) r = den - r;  // sin(pi - x) = sin(x)
  if (2 * r == den) return sign;
  return sign * std::sin(kPi * static_cast<double>(r) / static_cast<double>(den));
}

double cos_pi_ratio(std::int64_t num, std::int64_t den) {
  return sin_pi_ratio(2 * num + den, 2 * den);
}

VolatilityCurve::VolatilityCurve(CurveParams params) : params_(std::move(params)) {}

VolatilityCurve VolatilityCurve::constant(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("constant curve needs sigma > 0");
  return VolatilityCurve(ConstantCurve{sigma});
}

VolatilityCurve VolatilityCurve::shifted_quartic(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c))
    throw DomainError("quartic curve parameters must be finite");
  VolatilityCurve curve(ShiftedQuarticCurve{a, b, c});
  curve.check_positive();
  return curve;
}

VolatilityCurve VolatilityCurve::cosine_perturbation(std::int64_t n_freq, double alpha) {
  if (n_freq < 1) throw DomainError("cosine curve needs n_freq >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("cosine curve needs alpha > 0");
  VolatilityCurve curve(CosinePerturbationCurve{n_freq, alpha});
  curve.check_positive();
  return curve;
}

VolatilityCurve VolatilityCurve::tabulated(std::vector<Knot> knots) {
  VolatilityCurve curve = tabulated_unchecked(std::move(knots));
  curve.check_positive();
  return curve;
}

VolatilityCurve VolatilityCurve::tabulated_unchecked(std::vector<Knot> knots) {
  if (knots.size() < 2) throw DomainError("tabulated curve needs at least two knots");
  if (knots.front().t != 0.0 || knots.back().t != 1.0)
    throw DomainError("tabulated curve knots must cover t=0 and t=1");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].sigma) || !std::isfinite(knots[i].t))
      throw DomainError("tabulated curve knots must be finite");
    if (i > 0 && !(knots[i].t > knots[i - 1].t))
      throw DomainError("tabulated curve knots must be strictly increasing in t");
  }
  VolatilityCurve curve(TabulatedCurve{std::move(knots)});
  curve.build_cumulative();
  return curve;
}

void VolatilityCurve::build_cumulative() {
  const auto& knots = std::get<TabulatedCurve>(params_).knots;
  cumulative_.assign(knots.size(), 0.0);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double len = knots[i].t - knots[i - 1].t;
    const double slope = (knots[i].sigma - knots[i - 1].sigma) / len;
    cumulative_[i] = cumulative_[i - 1] + linear_sq_integral(knots[i - 1].sigma, slope, len);
  }
}

void VolatilityCurve::check_positive() const {
  constexpr std::size_t kResolution = 10000;
  auto fail = [](double t, double value) {
    std::ostringstream msg;
    msg << "volatility not strictly positive at t=" << t << " (sigma^2=" << value << ")";
    throw DomainError(msg.str());
  };
  for (std::size_t i = 0; i <= kResolution; ++i) {
    const double t = static_cast<double>(i) / kResolution;
    const double s = sigma(t);
    if (!(s > 0.0) || !std::isfinite(s)) fail(t, s * s);
  }
  if (const auto* tab = std::get_if<TabulatedCurve>(&params_)) {
    for (const auto& k : tab->knots)
      if (!(k.sigma > 0.0)) fail(k.t, k.sigma * k.sigma);
  }
}

double VolatilityCurve::sigma(double t) const {
  check_unit_time(t);
  return std::visit(
      Overloaded{
          [](const ConstantCurve& c) { return c.sigma; },
          [t](const ShiftedQuarticCurve& q) {
            const double u = t - q.c;
            return q.a + q.b * u * u * u * u;
          },
          [t](const CosinePerturbationCurve& c) {
            const double s2 = 1.0 + cosine_amplitude(c) * std::cos(kPi * c.n_freq * t);
            return std::sqrt(std::max(s2, 0.0));
          },
          [t](const TabulatedCurve& tab) {
            const auto& k = tab.knots;
            auto it = std::upper_bound(k.begin(), k.end(), t,
                                       [](double v, const Knot& knot) { return v < knot.t; });
            if (it == k.end()) return k.back().sigma;
            const auto& hi = *it;
            const auto& lo = *(it - 1);
            const double w = (t - lo.t) / (hi.t - lo.t);
            return lo.sigma + w * (hi.sigma - lo.sigma);
          },
      },
      params_);
}

double VolatilityCurve::sigma2(double t) const {
  if (const auto* c = std::get_if<CosinePerturbationCurve>(&params_)) {
    check_unit_time(t);
    return 1.0 + cosine_amplitude(*c) * std::cos(kPi * c->n_freq * t);
  }
  const double s = sigma(t);
  return s * s;
}

double VolatilityCurve::integrated_variance(double t0, double t1) const {
  check_unit_time(t0);
  check_unit_time(t1);
  if (t1 < t0) throw DomainError("integrated_variance: t1 < t0");
  const double dt = t1 - t0;
  return std::visit(
      Overloaded{
          [dt](const ConstantCurve& c) { return c.sigma * c.sigma * dt; },
          [=](const ShiftedQuarticCurve& q) { return quartic_integral(q, t0, t1, dt); },
          [=](const CosinePerturbationCurve& c) {
            // sin(b) - sin(a) = 2 cos((a+b)/2) sin((b-a)/2)
            const double w = kPi * static_cast<double>(c.n_freq);
            return dt + cosine_amplitude(c) / w * 2.0 * std::cos(0.5 * w * (t0 + t1)) *
                            std::sin(0.5 * w * dt);
          },
          [&](const TabulatedCurve& tab) {
            const auto& k = tab.knots;
            auto running = [&](double t) {
              auto it = std::upper_bound(k.begin(), k.end(), t,
                                         [](double v, const Knot& knot) { return v < knot.t; });
              if (it == k.end()) return cumulative_.back();
              const std::size_t seg = static_cast<std::size_t>(it - k.begin()) - 1;
              const double len = k[seg + 1].t - k[seg].t;
              const double slope = (k[seg + 1].sigma - k[seg].sigma) / len;
              return cumulative_[seg] + linear_sq_integral(k[seg].sigma, slope, t - k[seg].t);
            };
            return running(t1) - running(t0);
          },
      },
      params_);
}

double VolatilityCurve::cell_variance(std::size_t i, std::size_t n) const {
  if (n == 0 || i < 1 || i > n) throw DomainError("cell index outside 1..n");
  const double dt = 1.0 / static_cast<double>(n);
  const double t0 = static_cast<double>(i - 1) / static_cast<double>(n);
  const double t1 = static_cast<double>(i) / static_cast<double>(n);
  if (const auto* c = std::get_if<ConstantCurve>(&params_)) return c->sigma * c->sigma * dt;
  if (const auto* q = std::get_if<ShiftedQuarticCurve>(&params_)) return quartic_integral(*q, t0, t1, dt);
  if (const auto* c = std::get_if<CosinePerturbationCurve>(&params_)) {
    // phases are rational multiples of pi; evaluate them exactly so the
    // perturbation vanishes on matched grids
    const auto nn = static_cast<std::int64_t>(n);
    const auto num = c->n_freq * static_cast<std::int64_t>(2 * i - 1);
    const double osc = 2.0 * cos_pi_ratio(num, 2 * nn) * sin_pi_ratio(c->n_freq, 2 * nn);
    return dt + cosine_amplitude(*c) / (kPi * static_cast<double>(c->n_freq)) * osc;
  }
  return integrated_variance(t0, t1);
}

double VolatilityCurve::integral_sigma_power(double p) const {
  if (!(p > 0.0)) throw DomainError("integral_sigma_power needs p > 0");
  const bool integer_p = p == std::round(p) && p <= 16.0;
  return std::visit(
      Overloaded{
          [p](const ConstantCurve& c) { return std::pow(c.sigma, p); },
          [&](const ShiftedQuarticCurve& q) {
            if (integer_p) {
              const int m_max = static_cast<int>(p);
              const double u0 = -q.c, u1 = 1.0 - q.c;
              double acc = 0.0, binom = 1.0;
              for (int m = 0; m <= m_max; ++m) {
                const int e = 4 * m + 1;
                acc += binom * std::pow(q.a, m_max - m) * std::pow(q.b, m) *
                       power_difference(u1, u0, e, 1.0) / e;
                binom = binom * (m_max - m) / (m + 1);
              }
              return acc;
            }
            return adaptive_integral([&](double t) { return std::pow(sigma(t), p); }, 0.0, 1.0);
          },
          [&](const CosinePerturbationCurve& c) {
            const double amp = cosine_amplitude(c);
            // integer n_freq: int cos(pi n t) = 0, int cos^2 = 1/2 over [0,1]
            if (p == 2.0) return 1.0;
            if (p == 4.0) return 1.0 + 0.5 * amp * amp;
            double acc = 0.0;
            const auto pieces = static_cast<std::size_t>(c.n_freq);
            for (std::size_t piece = 0; piece < pieces; ++piece) {
              const double a = static_cast<double>(piece) / pieces;
              const double b = static_cast<double>(piece + 1) / pieces;
              acc += adaptive_integral([&](double t) { return std::pow(sigma2(t), 0.5 * p); }, a, b);
            }
            return acc;
          },
          [&](const TabulatedCurve& tab) {
            // sigma is linear on each segment: Gauss-Legendre is exact for
            // integer powers up to 39
            using GL = boost::math::quadrature::gauss<double, 20>;
            double acc = 0.0;
            for (std::size_t s = 1; s < tab.knots.size(); ++s) {
              const Knot lo = tab.knots[s - 1], hi = tab.knots[s];
              acc += GL::integrate(
                  [&](double t) {
                    const double w = (t - lo.t) / (hi.t - lo.t);
                    return std::pow(std::max(lo.sigma + w * (hi.sigma - lo.sigma), 0.0), p);
                  },
                  lo.t, hi.t);
            }
            return acc;
          },
      },
      params_);
}

double VolatilityCurve::grid_min_sigma2(std::size_t resolution) const {
  double m = sigma2(0.0);
  for (std::size_t i = 1; i <= resolution; ++i)
    m = std::min(m, sigma2(static_cast<double>(i) / resolution));
  return m;
}

double VolatilityCurve::grid_max_sigma2(std::size_t resolution) const {
  double m = sigma2(0.0);
  for (std::size_t i = 1; i <= resolution; ++i)
    m = std::max(m, sigma2(static_cast<double>(i) / resolution));
  return m;
}

double eval_sigma2(const VolatilityCurve& curve, double t) { return curve.sigma2(t); }

double cell_variance(const VolatilityCurve& curve, std::size_t i, std::size_t n) {
  return curve.cell_variance(i, n);
}

VolatilityCurve counterexample_curve(std::int64_t n_freq, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("counterexample curve needs alpha in (0,1)");
  return VolatilityCurve::cosine_perturbation(n_freq, alpha);
}

}  // namespace volspec
