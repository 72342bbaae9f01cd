#include "volspec/verify.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "volspec/errors.hpp"
#include "volspec/gaussmetrics.hpp"
#include "volspec/simulate.hpp"

namespace volspec {
namespace {

Eigen::MatrixXd random_spd(Eigen::Index d, GaussianStream& rng) {
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = rng.next();
  Eigen::MatrixXd s = a * a.transpose() / static_cast<double>(d);
  s.diagonal().array() += 0.1;
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd random_vector(Eigen::Index d, GaussianStream& rng, double scale) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = scale * rng.next();
  return v;
}

// log-uniform on [1e-3, 1]
double random_scale(GaussianStream& rng) {
  const double u = 0.5 * (1.0 + std::erf(rng.next() / std::numbers::sqrt2));
  return std::pow(10.0, -3.0 * u);
}

// Symmetric perturbation keeping the result positive definite.
Eigen::MatrixXd perturb(const Eigen::MatrixXd& s, GaussianStream& rng) {
  const Eigen::Index d = s.rows();
  Eigen::MatrixXd e = random_spd(d, rng) - random_spd(d, rng);
  const double eps = random_scale(rng);
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(s).eigenvalues()(0);
  const double norm = e.norm();
  Eigen::MatrixXd out = s + (0.9 * min_eig * eps / norm) * e;
  // occasionally a large change in scale as well
  if (rng.next() > 1.0) out *= 1.0 + std::abs(rng.next());
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

double quadrature_h2(double m1, double s1, double m2, double s2) {
  auto root_density = [&](double x) {
    const double z1 = (x - m1) / s1, z2 = (x - m2) / s2;
    return std::exp(-0.25 * (z1 * z1 + z2 * z2)) / std::sqrt(2.0 * std::numbers::pi * s1 * s2);
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  const double affinity = GK::integrate(root_density, -inf, inf, 15, 1e-12);
  return 2.0 - 2.0 * affinity;
}

}  // namespace

VolatilityCurve sine_test_curve(std::size_t knots) {
  if (knots < 2) throw ConfigError("sine_test_curve: need at least 2 knots");
  std::vector<Knot> k(knots);
  for (std::size_t i = 0; i < knots; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(knots - 1);
    k[i] = {t, 1.0 + 0.5 * std::sin(2.0 * std::numbers::pi * t)};
  }
  return VolatilityCurve::tabulated(std::move(k));
}

HellingerSuite verify_hellinger(std::size_t pairs, std::size_t max_dim, std::size_t products,
                                std::uint64_t seed) {
  if (max_dim < 1) throw ConfigError("verify_hellinger: max_dim must be >= 1");
  GaussianStream rng(seed);
  HellingerSuite out;
  out.pairs = pairs;
  out.products = products;
  constexpr double kSlack = 1e-12;
  for (std::size_t p = 0; p < pairs; ++p) {
    const auto d = static_cast<Eigen::Index>(1 + p % max_dim);
    const Eigen::MatrixXd s1 = random_spd(d, rng);
    const Eigen::MatrixXd s2 = perturb(s1, rng);
    const Eigen::VectorXd m1 = random_vector(d, rng, 1.0);
    const Eigen::VectorXd m2 = m1 + random_vector(d, rng, random_scale(rng));

    const GaussianLaw a(m1, s1), b(m2, s2), same_cov(m2, s1), same_mean(m1, s2);
    const auto bound = hellinger_bound(a, b);
    const double h2 = hellinger_squared(a, b);
    if (h2 > bound.general * (1.0 + kSlack)) ++out.general_violations;
    if (bound.general > 0.0) out.max_general_ratio = std::max(out.max_general_ratio, h2 / bound.general);
    if (hellinger_squared(a, same_cov) > hellinger_bound(a, same_cov).mean_only * (1.0 + kSlack))
      ++out.mean_only_violations;
    if (hellinger_squared(a, same_mean) > hellinger_bound(a, same_mean).covariance_only * (1.0 + kSlack))
      ++out.covariance_only_violations;
  }
  for (std::size_t p = 0; p < products; ++p) {
    const auto d1 = static_cast<Eigen::Index>(1 + p % 3);
    const auto d2 = static_cast<Eigen::Index>(1 + (p / 3) % 3);
    const Eigen::MatrixXd p1 = random_spd(d1, rng), p2 = random_spd(d2, rng);
    const Eigen::MatrixXd q1 = perturb(p1, rng), q2 = perturb(p2, rng);
    const Eigen::VectorXd mp1 = random_vector(d1, rng, 1.0), mp2 = random_vector(d2, rng, 1.0);
    const Eigen::VectorXd mq1 = mp1 + random_vector(d1, rng, random_scale(rng));
    const Eigen::VectorXd mq2 = mp2 + random_vector(d2, rng, random_scale(rng));
    Eigen::VectorXd mp(d1 + d2), mq(d1 + d2);
    mp << mp1, mp2;
    mq << mq1, mq2;
    const double joint = hellinger_squared(GaussianLaw(mp, block_diag(p1, p2)),
                                           GaussianLaw(mq, block_diag(q1, q2)));
    const double sum = hellinger_squared(GaussianLaw(mp1, p1), GaussianLaw(mq1, q1)) +
                       hellinger_squared(GaussianLaw(mp2, p2), GaussianLaw(mq2, q2));
    if (joint > sum * (1.0 + kSlack)) ++out.product_violations;
    if (sum > 0.0) out.max_product_ratio = std::max(out.max_product_ratio, joint / sum);
  }
  auto law1 = [](double m, double s) {
    return GaussianLaw(Eigen::VectorXd::Constant(1, m), Eigen::MatrixXd::Constant(1, 1, s * s));
  };
  for (const double ratio : {0.1, 0.5, 0.9, 1.5, 4.0}) {
    const double err = std::abs(hellinger_squared(law1(0.0, 1.0), law1(0.0, ratio)) -
                                quadrature_h2(0.0, 1.0, 0.0, ratio));
    out.scale_quadrature_error = std::max(out.scale_quadrature_error, err);
  }
  for (const double shift : {0.01, 0.3, 1.0, 2.5, 6.0}) {
    const double err = std::abs(hellinger_squared(law1(0.0, 1.3), law1(shift, 1.3)) -
                                quadrature_h2(0.0, 1.3, shift, 1.3));
    out.shift_quadrature_error = std::max(out.shift_quadrature_error, err);
  }
  return out;
}

RegressionDecay verify_regression_bound(const VolatilityCurve& curve, double delta,
                                        const std::vector<std::size_t>& ns) {
  if (ns.size() < 2) throw ConfigError("verify_regression_bound: need at least two values of n");
  RegressionDecay out;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const std::size_t n : ns) {
    const auto cov = regression_covariances(curve, n, delta);
    const GaussianLaw observed(cov.observed), smoothed(cov.smoothed);
    RegressionDecayRow row;
    row.n = n;
    row.hellinger_sq = hellinger_squared(observed, smoothed);
    row.hs_bound = hellinger_bound(observed, smoothed).covariance_only;
    out.rows.push_back(row);
    if (!(row.hellinger_sq > 0.0))
      throw EstimationError("verify_regression_bound: H^2 vanished at n = " + std::to_string(n));
    const double x = std::log(static_cast<double>(n)), y = std::log(row.hellinger_sq);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = static_cast<double>(ns.size());
  out.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.strictly_decreasing = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (!(out.rows[i].hellinger_sq < out.rows[i - 1].hellinger_sq)) out.strictly_decreasing = false;
  return out;
}

std::vector<CounterexampleRow> verify_counterexample(const std::vector<std::size_t>& ns,
                                                     double alpha) {
  std::vector<CounterexampleRow> out;
  for (const std::size_t n : ns) {
    const auto curve = counterexample_curve(static_cast<std::int64_t>(n), alpha);
    CounterexampleRow row;
    row.n = n;
    for (std::size_t i = 1; i <= n; ++i)
      row.max_abs_deviation =
          std::max(row.max_abs_deviation, std::abs(curve.cell_variance(i, n) - 1.0 / static_cast<double>(n)));
    out.push_back(row);
  }
  return out;
}

}  // namespace volspec
