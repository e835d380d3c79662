#pragma once

// Fits SABR parameters to implied-vol quotes by unweighted least squares in
// vol space. The search runs over the transformed coordinates (log alpha,
// log nu, 2 atanh rho), so every iterate is a valid parameter set.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "smilefx/errors.hpp"
#include "smilefx/market.hpp"
#include "smilefx/optimize.hpp"
#include "smilefx/sabr.hpp"
#include "smilefx/transform.hpp"

namespace smilefx {

struct CalibrationOptions {
  int max_iter = 500;
  double objective_tol = 1e-14;
  double nu_floor = 1e-6;
  double rho_bound = 0.9999;
};

struct CalibrationResult {
  SabrParams params;
  double objective = 0.0;
  double initial_objective = 0.0;
  int iterations = 0;
};

inline double calibration_objective(const SabrParams& params, std::span<const OptionQuote> quotes,
                                    double forward, double maturity) {
  double sum = 0.0;
  for (const auto& q : quotes) {
    const double diff = sabr_vol(params, forward, q.strike, maturity) - q.implied_vol;
    sum += diff * diff;
  }
  return sum;
}

inline CalibrationResult calibrate(std::span<const OptionQuote> quotes, const MarketSnapshot& snapshot,
                                   const SabrParams& initial, const CalibrationOptions& opts = {}) {
  snapshot.validate();
  initial.validate();
  if (quotes.size() < 3) fail(ErrorKind::DegenerateInput, "calibration needs at least 3 quotes");
  std::vector<double> strikes;
  for (const auto& q : quotes) {
    q.validate();
    strikes.push_back(q.strike);
  }
  std::sort(strikes.begin(), strikes.end());
  if (std::adjacent_find(strikes.begin(), strikes.end()) != strikes.end())
    fail(ErrorKind::DegenerateInput, "quote strikes must be distinct");

  const double forward = forward_rate(snapshot);
  const double maturity = snapshot.maturity;
  auto unpack = [](const optim::Vector& x) { return from_unconstrained({x[0], x[1], x[2]}); };
  const optim::ResidualFn residuals = [&](const optim::Vector& x) {
    const SabrParams p = unpack(x);
    optim::Vector r(static_cast<Eigen::Index>(quotes.size()));
    for (std::size_t i = 0; i < quotes.size(); ++i)
      r[static_cast<Eigen::Index>(i)] = sabr_vol(p, forward, quotes[i].strike, maturity) - quotes[i].implied_vol;
    return r;
  };

  const double r_bound = 2.0 * std::atanh(opts.rho_bound);
  optim::LevenbergMarquardtOptions lm;
  lm.max_iter = opts.max_iter;
  lm.f_tol = opts.objective_tol;
  lm.lower = optim::Vector{{-50.0, std::log(opts.nu_floor), -r_bound}};
  lm.upper = optim::Vector{{50.0, 10.0, r_bound}};

  SabrParams start = initial;
  start.nu = std::max(start.nu, opts.nu_floor);
  start.rho = std::clamp(start.rho, -opts.rho_bound, opts.rho_bound);
  const TransformedParams t0 = to_unconstrained(start);
  const optim::Vector x0{{t0.a, t0.n, t0.r}};

  const double initial_objective = calibration_objective(initial, quotes, forward, maturity);
  const auto fit = optim::levenberg_marquardt(residuals, x0, lm);
  if (!fit.converged) fail(ErrorKind::NonConvergence, "SABR calibration hit the iteration cap");

  CalibrationResult out;
  out.initial_objective = initial_objective;
  out.iterations = fit.iterations;
  out.params = unpack(fit.x);
  out.objective = calibration_objective(out.params, quotes, forward, maturity);
  // No improvement: keep the caller's parameters exactly.
  if (out.objective >= initial_objective) {
    out.params = initial;
    out.objective = initial_objective;
  }
  return out;
}

}  // namespace smilefx
