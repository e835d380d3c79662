#pragma once

// Model-building diagnostics: sample ACF/PACF, augmented Dickey-Fuller,
// Engle's ARCH-LM test and information criteria.

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smilefx/errors.hpp"
#include "smilefx/regression.hpp"

namespace smilefx {

struct TestResult {
  double statistic = 0.0;
  std::map<std::string, double> critical_values;  // keys "1%", "5%", "10%"
  bool reject = false;                            // at the 5% level
};

// Sample autocorrelations for lags 0..max_lag (lag 0 is 1).
inline std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n < 2 || 2 * max_lag >= n) fail(ErrorKind::TooShort, "acf needs max_lag < length / 2");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double denom = 0.0;
  for (double v : series) denom += (v - mean) * (v - mean);
  if (!(denom > 0.0)) fail(ErrorKind::DegenerateInput, "series has zero variance");

  std::vector<double> out(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double num = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) num += (series[t] - mean) * (series[t + k] - mean);
    out[k] = num / denom;
  }
  out[0] = 1.0;
  return out;
}

// Partial autocorrelations by the Durbin-Levinson recursion; index k holds
// lag k and index 0 is 1 to line up with acf().
inline std::vector<double> pacf(std::span<const double> series, std::size_t max_lag) {
  const auto r = acf(series, max_lag);
  std::vector<double> out(max_lag + 1, 0.0);
  out[0] = 1.0;
  if (max_lag == 0) return out;
  std::vector<double> phi(max_lag + 1, 0.0);
  std::vector<double> prev(max_lag + 1, 0.0);
  phi[1] = r[1];
  out[1] = r[1];
  double v = 1.0 - r[1] * r[1];
  for (std::size_t k = 2; k <= max_lag; ++k) {
    prev = phi;
    double num = r[k];
    for (std::size_t j = 1; j < k; ++j) num -= prev[j] * r[k - j];
    const double kk = v > 0.0 ? num / v : 0.0;
    phi[k] = kk;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - kk * prev[k - j];
    v *= 1.0 - kk * kk;
    out[k] = kk;
  }
  return out;
}

inline std::size_t default_adf_lags(std::size_t n) {
  return static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n) - 1.0)));
}

// Regression with a constant and no trend:
//   dy_t = c + gamma y_{t-1} + sum_i delta_i dy_{t-i} + e_t
// Critical values are the fixed asymptotic constant-only table.
inline TestResult adf_test(std::span<const double> series, std::optional<std::size_t> n_lags = std::nullopt) {
  const std::size_t n = series.size();
  const std::size_t lags = n_lags ? *n_lags : (n > 1 ? default_adf_lags(n) : 0);
  if (n <= lags + 10) fail(ErrorKind::TooShort, "adf needs length > n_lags + 10");

  std::vector<double> dy(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) dy[t] = series[t + 1] - series[t];
  // dy[t] = y[t+1] - y[t]; regress dy[t] on y[t] and dy[t-1..t-lags]
  const auto rows = static_cast<Eigen::Index>(dy.size() - lags);
  const auto cols = static_cast<Eigen::Index>(2 + lags);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = static_cast<std::size_t>(r) + lags;
    design(r, 0) = 1.0;
    design(r, 1) = series[t];
    for (std::size_t i = 1; i <= lags; ++i) design(r, static_cast<Eigen::Index>(1 + i)) = dy[t - i];
    y[r] = dy[t];
  }
  const auto fit = ols(design, y);
  TestResult out;
  out.statistic = fit.coef[1] / fit.stderr_[1];
  out.critical_values = {{"1%", -3.43}, {"5%", -2.86}, {"10%", -2.57}};
  out.reject = out.statistic < out.critical_values.at("5%");
  return out;
}

// T * R^2 from regressing e_t^2 on a constant and n_lags of its own lags,
// against chi-squared(n_lags).
inline TestResult arch_lm_test(std::span<const double> residuals, std::size_t n_lags) {
  const std::size_t n = residuals.size();
  if (n_lags < 1) fail(ErrorKind::InvalidInput, "ARCH-LM needs at least one lag");
  if (n <= n_lags + 10) fail(ErrorKind::TooShort, "ARCH-LM needs length > n_lags + 10");
  std::vector<double> sq(n);
  for (std::size_t t = 0; t < n; ++t) sq[t] = residuals[t] * residuals[t];

  const auto rows = static_cast<Eigen::Index>(n - n_lags);
  Eigen::MatrixXd design(rows, static_cast<Eigen::Index>(n_lags + 1));
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = static_cast<std::size_t>(r) + n_lags;
    design(r, 0) = 1.0;
    for (std::size_t i = 1; i <= n_lags; ++i) design(r, static_cast<Eigen::Index>(i)) = sq[t - i];
    y[r] = sq[t];
  }
  const auto fit = ols(design, y);
  const boost::math::chi_squared chi2(static_cast<double>(n_lags));
  TestResult out;
  out.statistic = static_cast<double>(rows) * fit.r_squared;
  out.critical_values = {{"1%", boost::math::quantile(chi2, 0.99)},
                         {"5%", boost::math::quantile(chi2, 0.95)},
                         {"10%", boost::math::quantile(chi2, 0.90)}};
  out.reject = out.statistic > out.critical_values.at("5%");
  return out;
}

struct InformationCriteria {
  double aic = 0.0;
  double bic = 0.0;
};

// n_obs is real-valued so the criteria can be evaluated at any sample size.
inline InformationCriteria information_criteria(double loglik, std::size_t k_params, double n_obs) {
  if (!(n_obs > 0.0)) fail(ErrorKind::InvalidInput, "n_obs must be > 0");
  const double k = static_cast<double>(k_params);
  return {-2.0 * loglik + 2.0 * k, -2.0 * loglik + k * std::log(n_obs)};
}

}  // namespace smilefx
