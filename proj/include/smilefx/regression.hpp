#pragma once

#include <Eigen/Dense>

#include <cmath>

#include "smilefx/errors.hpp"

namespace smilefx {

struct OlsResult {
  Eigen::VectorXd coef;
  Eigen::VectorXd stderr_;
  Eigen::VectorXd residuals;
  double sigma2 = 0.0;     // residual variance with n - k degrees of freedom
  double r_squared = 0.0;  // centred
};

// Ordinary least squares through a column-pivoting QR; a rank-deficient
// design is reported as a singular regression.
inline OlsResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto n = x.rows();
  const auto k = x.cols();
  if (n <= k) fail(ErrorKind::TooShort, "regression needs more rows than regressors");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) fail(ErrorKind::SingularMatrix, "regression design is rank deficient");

  OlsResult out;
  out.coef = qr.solve(y);
  out.residuals = y - x * out.coef;
  const double rss = out.residuals.squaredNorm();
  out.sigma2 = rss / static_cast<double>(n - k);
  const double mean = y.mean();
  const double tss = (y.array() - mean).square().sum();
  out.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;

  const Eigen::MatrixXd xtx = x.transpose() * x;
  const Eigen::MatrixXd inv = xtx.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
  out.stderr_ = (out.sigma2 * inv.diagonal().array()).sqrt();
  return out;
}

}  // namespace smilefx
