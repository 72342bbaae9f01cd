#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <utility>

#include "volspec/curve.hpp"

namespace volspec {

/// N(mean, cov) with cov symmetric positive definite, dimension <= 512.
class GaussianLaw {
 public:
  static constexpr std::size_t kMaxDimension = 512;

  GaussianLaw(Eigen::VectorXd mean, Eigen::MatrixXd cov);
  explicit GaussianLaw(const Eigen::MatrixXd& cov);

  std::size_t dimension() const { return static_cast<std::size_t>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& cov() const { return cov_; }
  /// Lower Cholesky factor L, cov = L L^T.
  const Eigen::MatrixXd& cholesky() const { return chol_; }
  double log_det() const { return log_det_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd cov_;
  Eigen::MatrixXd chol_;
  double log_det_ = 0.0;
};

/// Squared Hellinger distance (normalisation H^2 = 2 - 2 int sqrt(pq)):
///   2 - 2 det(S1)^{1/4} det(S2)^{1/4} det(S)^{-1/2} exp(-(m1-m2)' S^{-1} (m1-m2)/8),
/// S = (S1+S2)/2, from Cholesky log-determinants.
double hellinger_squared(const GaussianLaw& p, const GaussianLaw& q);
/// H in [0, sqrt 2].
double hellinger_exact(const GaussianLaw& p, const GaussianLaw& q);

/// Upper bounds on H^2(p, q) built from
///   m = ||S1^{-1/2}(m1 - m2)||^2,  c = ||S1^{-1/2}(S2 - S1)S1^{-1/2}||_HS^2.
struct HellingerBounds {
  double mean_norm_sq = 0.0;        ///< m
  double covariance_hs_sq = 0.0;    ///< c
  double mean_only = 0.0;           ///< m/4, valid when S1 == S2
  double covariance_only = 0.0;     ///< 2c, valid when m1 == m2
  /// m/2 + 4c: triangle inequality through N(m2, S1) and (a+b)^2 <= 2a^2 + 2b^2
  double general = 0.0;
};

HellingerBounds hellinger_bound(const GaussianLaw& p, const GaussianLaw& q);

/// Covariances of (Y_i) and of the symmetric local means (Y~_i), i = 1..n:
///   SY_kl = a(min(k,l)/n) + delta^2 [k == l]
///   SY~_kl = n int_{(2m-1)/2n}^{(2m+1)/2n} a(t) dt + delta^2 [k == l], m = min(k,l)
/// with a(t) = int_0^t sigma^2 and a(1+s) := a(1-s).
struct RegressionCovariances {
  Eigen::MatrixXd observed;
  Eigen::MatrixXd smoothed;
};

RegressionCovariances regression_covariances(const VolatilityCurve& curve, std::size_t n,
                                             double delta);

struct WhiteNoiseBound {
  double sup_difference = 0.0;  ///< ||s1^2 - s2^2||_inf on a 10^4 grid (lower bound on the sup)
  double lambda_l2 = 0.0;       ///< ||(lambda_k)||_l2 including the analytic tail
  double bound = 0.0;           ///< product of the two
};

/// lambda_k = 4 / (4 min s1^2 + (2k-1)^2 pi^2 eps^2), k = 1..K, tail beyond K
/// bounded by 16 / (pi^4 eps^4) / (6 (2K-1)^3).
WhiteNoiseBound white_noise_bound(const VolatilityCurve& curve1, const VolatilityCurve& curve2,
                                  double eps, std::size_t K = 100000);

}  // namespace volspec
