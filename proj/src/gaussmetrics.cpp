#include "volspec/gaussmetrics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "volspec/errors.hpp"

namespace volspec {
namespace {

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success)
    throw DomainError(std::string(what) + ": covariance is not positive definite");
  return llt;
}

double log_det_from(const Eigen::MatrixXd& lower) {
  return 2.0 * lower.diagonal().array().log().sum();
}

void check_same_dimension(const GaussianLaw& p, const GaussianLaw& q) {
  if (p.dimension() != q.dimension())
    throw ConfigError("Gaussian laws have different dimensions (" + std::to_string(p.dimension()) +
                      " vs " + std::to_string(q.dimension()) + ")");
}

}  // namespace

GaussianLaw::GaussianLaw(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
  const auto d = cov_.rows();
  if (cov_.cols() != d || mean_.size() != d)
    throw ConfigError("Gaussian law: mean/covariance dimensions disagree");
  if (d == 0 || static_cast<std::size_t>(d) > kMaxDimension)
    throw ConfigError("Gaussian law: dimension must be in 1.." + std::to_string(kMaxDimension));
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw DomainError("Gaussian law: covariance is not symmetric");
  chol_ = factor(cov_, "Gaussian law").matrixL();
  log_det_ = log_det_from(chol_);
}

GaussianLaw::GaussianLaw(const Eigen::MatrixXd& cov)
    : GaussianLaw(Eigen::VectorXd::Zero(cov.rows()), cov) {}

double hellinger_squared(const GaussianLaw& p, const GaussianLaw& q) {
  check_same_dimension(p, q);
  const Eigen::MatrixXd avg = 0.5 * (p.cov() + q.cov());
  const auto llt = factor(avg, "hellinger");
  const Eigen::MatrixXd lower = llt.matrixL();
  const Eigen::VectorXd diff = p.mean() - q.mean();
  const double quad = diff.dot(llt.solve(diff));
  const double log_affinity =
      0.25 * p.log_det() + 0.25 * q.log_det() - 0.5 * log_det_from(lower) - quad / 8.0;
  // 2 - 2 exp(x) without cancellation for x near 0
  return std::clamp(-2.0 * std::expm1(log_affinity), 0.0, 2.0);
}

double hellinger_exact(const GaussianLaw& p, const GaussianLaw& q) {
  return std::sqrt(hellinger_squared(p, q));
}

HellingerBounds hellinger_bound(const GaussianLaw& p, const GaussianLaw& q) {
  check_same_dimension(p, q);
  const auto L = p.cholesky().triangularView<Eigen::Lower>();
  const Eigen::VectorXd v = L.solve(p.mean() - q.mean());
  // L^{-1} (S2 - S1) L^{-T}; same Hilbert-Schmidt norm as S1^{-1/2}(S2 - S1)S1^{-1/2}
  Eigen::MatrixXd a = L.solve(q.cov() - p.cov());
  a = L.solve(a.transpose()).transpose();
  HellingerBounds b;
  b.mean_norm_sq = v.squaredNorm();
  b.covariance_hs_sq = a.squaredNorm();
  b.mean_only = 0.25 * b.mean_norm_sq;
  b.covariance_only = 2.0 * b.covariance_hs_sq;
  b.general = 0.5 * b.mean_norm_sq + 4.0 * b.covariance_hs_sq;
  return b;
}

RegressionCovariances regression_covariances(const VolatilityCurve& curve, std::size_t n,
                                             double delta) {
  if (n < 1 || n > GaussianLaw::kMaxDimension)
    throw ConfigError("regression covariances: n must be in 1.." +
                      std::to_string(GaussianLaw::kMaxDimension));
  if (!(delta >= 0.0)) throw DomainError("regression covariances: delta must be >= 0");
  const double nd = static_cast<double>(n);
  // a(t) with the reflection a(1+s) = a(1-s)
  auto a = [&](double t) { return curve.integrated_variance(0.0, t <= 1.0 ? t : 2.0 - t); };
  auto integrate = [&](double lo, double hi) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    if (hi <= 1.0) return GK::integrate(a, lo, hi, 10, 1e-14);
    return GK::integrate(a, lo, 1.0, 10, 1e-14) + GK::integrate(a, 1.0, hi, 10, 1e-14);
  };
  std::vector<double> at_grid(n), local_mean(n);
  for (std::size_t m = 1; m <= n; ++m) {
    at_grid[m - 1] = a(static_cast<double>(m) / nd);
    local_mean[m - 1] = nd * integrate((2.0 * m - 1.0) / (2.0 * nd), (2.0 * m + 1.0) / (2.0 * nd));
  }
  RegressionCovariances out;
  const auto d = static_cast<Eigen::Index>(n);
  out.observed.resize(d, d);
  out.smoothed.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index l = 0; l < d; ++l) {
      const auto m = static_cast<std::size_t>(std::min(k, l));
      const double noise = k == l ? delta * delta : 0.0;
      out.observed(k, l) = at_grid[m] + noise;
      out.smoothed(k, l) = local_mean[m] + noise;
    }
  }
  return out;
}

WhiteNoiseBound white_noise_bound(const VolatilityCurve& curve1, const VolatilityCurve& curve2,
                                  double eps, std::size_t K) {
  if (!(eps > 0.0)) throw DomainError("white_noise_bound: eps must be > 0");
  if (K < 1) throw DomainError("white_noise_bound: K must be >= 1");
  constexpr std::size_t kResolution = 10000;
  WhiteNoiseBound out;
  for (std::size_t i = 0; i <= kResolution; ++i) {
    const double t = static_cast<double>(i) / kResolution;
    out.sup_difference = std::max(out.sup_difference, std::abs(curve1.sigma2(t) - curve2.sigma2(t)));
  }
  const double floor = curve1.grid_min_sigma2(kResolution);
  const double pe2 = std::numbers::pi * std::numbers::pi * eps * eps;
  double acc = 0.0;
  for (std::size_t k = K; k >= 1; --k) {
    const double odd = 2.0 * static_cast<double>(k) - 1.0;
    const double lambda = 4.0 / (4.0 * floor + odd * odd * pe2);
    acc += lambda * lambda;
  }
  const double odd_k = 2.0 * static_cast<double>(K) - 1.0;
  const double tail = 16.0 / (pe2 * pe2) / (6.0 * odd_k * odd_k * odd_k);
  out.lambda_l2 = std::sqrt(acc + tail);
  out.bound = out.sup_difference * out.lambda_l2;
  return out;
}

}  // namespace volspec
