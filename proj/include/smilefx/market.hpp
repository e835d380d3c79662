#pragma once

// Black-Scholes pricing on the forward, implied-volatility inversion and
// put-call parity. Volatilities are decimals (0.10 == 10%) throughout.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "smilefx/errors.hpp"

namespace smilefx {

struct MarketSnapshot {
  double spot = 100.0;
  double rate_dom = 0.0;  // continuously compounded, per year
  double rate_for = 0.0;
  double maturity = 1.0 / 12.0;  // year fraction

  void validate() const {
    if (!(spot > 0.0) || !std::isfinite(spot)) fail(ErrorKind::InvalidInput, "spot must be > 0");
    if (!(maturity > 0.0) || !std::isfinite(maturity))
      fail(ErrorKind::InvalidInput, "maturity must be > 0");
    if (!std::isfinite(rate_dom) || !std::isfinite(rate_for))
      fail(ErrorKind::InvalidInput, "rates must be finite");
  }

  bool operator==(const MarketSnapshot&) const = default;
};

struct OptionQuote {
  double strike = 0.0;
  double implied_vol = 0.0;

  void validate() const {
    if (!(strike > 0.0)) fail(ErrorKind::InvalidInput, "strike must be > 0");
    if (!(implied_vol > 0.0)) fail(ErrorKind::InvalidInput, "implied_vol must be > 0");
  }
};

// Standard normal CDF through erfc. glibc's erfc is accurate to about one
// ulp, so the absolute error stays well below 1e-15 on the whole line and
// the lower tail keeps full relative precision down to underflow.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0); }

inline double norm_pdf(double x) {
  constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599343818684759;
  return inv_sqrt_2pi * std::exp(-0.5 * x * x);
}

inline double forward_rate(const MarketSnapshot& snapshot) {
  snapshot.validate();
  return std::exp((snapshot.rate_dom - snapshot.rate_for) * snapshot.maturity) * snapshot.spot;
}

namespace detail {

inline void check_contract(double forward, double strike, double maturity) {
  if (!(forward > 0.0) || !std::isfinite(forward)) fail(ErrorKind::InvalidInput, "forward must be > 0");
  if (!(strike > 0.0) || !std::isfinite(strike)) fail(ErrorKind::InvalidInput, "strike must be > 0");
  if (!(maturity > 0.0) || !std::isfinite(maturity))
    fail(ErrorKind::InvalidInput, "maturity must be > 0");
}

// Undiscounted value of the out-of-the-money option at this strike: the call
// when strike >= forward, otherwise the put. Both are free of the intrinsic
// part, so tiny time values keep their relative precision.
inline double otm_value(double forward, double strike, double total_sd) {
  if (total_sd <= 0.0) return 0.0;
  const double d_plus = std::log(forward / strike) / total_sd + 0.5 * total_sd;
  const double d_minus = d_plus - total_sd;
  if (strike >= forward) {
    return std::max(forward * norm_cdf(d_plus) - strike * norm_cdf(d_minus), 0.0);
  }
  return std::max(strike * norm_cdf(-d_minus) - forward * norm_cdf(-d_plus), 0.0);
}

}  // namespace detail

// Discounted call price e^{-r_d T} [F N(d+) - K N(d-)]; vol = 0 gives the
// discounted intrinsic value.
inline double bs_call(double forward, double strike, double maturity, double vol, double rate_dom) {
  detail::check_contract(forward, strike, maturity);
  if (!(vol >= 0.0) || !std::isfinite(vol)) fail(ErrorKind::InvalidInput, "vol must be >= 0");
  const double discount = std::exp(-rate_dom * maturity);
  const double intrinsic = discount * std::max(forward - strike, 0.0);
  const double upper = discount * forward;
  const double time_value = discount * detail::otm_value(forward, strike, vol * std::sqrt(maturity));
  return std::clamp(intrinsic + time_value, intrinsic, upper);
}

inline double bs_vega(double forward, double strike, double maturity, double vol, double rate_dom) {
  detail::check_contract(forward, strike, maturity);
  if (!(vol > 0.0) || !std::isfinite(vol)) fail(ErrorKind::InvalidInput, "vol must be > 0");
  const double total_sd = vol * std::sqrt(maturity);
  const double d_plus = std::log(forward / strike) / total_sd + 0.5 * total_sd;
  const double vega = std::exp(-rate_dom * maturity) * forward * norm_pdf(d_plus) * std::sqrt(maturity);
  // Far from the money the density underflows; vega is still positive.
  return std::max(vega, std::numeric_limits<double>::denorm_min());
}

inline double put_from_call(double call, double forward, double strike, double maturity, double rate_dom) {
  return call - std::exp(-rate_dom * maturity) * (forward - strike);
}

struct ImpliedVolOptions {
  double lower = 1e-6;
  double upper = 5.0;
  int max_iter = 200;
};

// Safeguarded Newton on the logarithm of the out-of-the-money time value,
// falling back to bisection whenever a step leaves the current bracket.
// In-the-money calls are reduced to the matching out-of-the-money put by
// parity before solving.
inline double implied_vol(double price, double forward, double strike, double maturity, double rate_dom,
                          const ImpliedVolOptions& opts = {}) {
  detail::check_contract(forward, strike, maturity);
  if (!std::isfinite(price)) fail(ErrorKind::InvalidInput, "price must be finite");
  const double discount = std::exp(-rate_dom * maturity);
  const double intrinsic = discount * std::max(forward - strike, 0.0);
  if (!(price > intrinsic))
    fail(ErrorKind::NoSolution, "price at or below intrinsic value " + std::to_string(intrinsic));
  if (!(price < discount * forward))
    fail(ErrorKind::NoSolution, "price at or above discounted forward");

  const double target = (price - intrinsic) / discount;
  const double log_target = std::log(target);
  const double sqrt_t = std::sqrt(maturity);
  const double log_moneyness = std::log(forward / strike);

  // g(vol) = log(otm(vol)) - log(target), increasing in vol.
  auto value = [&](double vol) { return detail::otm_value(forward, strike, vol * sqrt_t); };

  double lo = opts.lower;
  double hi = opts.upper;
  while (value(hi) < target) {
    hi *= 2.0;
    if (hi > 1e4) fail(ErrorKind::NonConvergence, "implied vol above search range");
  }
  while (lo > 1e-300 && value(lo) > target) lo *= 1e-3;

  // Start at the inflection point of the price in vol, when it lies inside.
  double vol = std::abs(log_moneyness) > 0.0 ? std::sqrt(2.0 * std::abs(log_moneyness) / maturity)
                                             : std::sqrt(2.0 * std::numbers::pi / maturity) * target / forward;
  if (!(vol > lo && vol < hi)) vol = 0.5 * (lo + hi);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const double v = value(vol);
    if (v == target) return vol;
    if (v < target) {
      lo = vol;
    } else {
      hi = vol;
    }
    double next = 0.5 * (lo + hi);
    if (v > 0.0) {
      const double total_sd = vol * sqrt_t;
      const double d_plus = log_moneyness / total_sd + 0.5 * total_sd;
      const double vega = forward * norm_pdf(d_plus) * sqrt_t;
      if (vega > 0.0) {
        const double newton = vol - (std::log(v) - log_target) * v / vega;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    const double step = std::abs(next - vol);
    vol = next;
    if (step <= 1e-15 * vol || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return vol;
  }
  fail(ErrorKind::NonConvergence, "implied vol iteration cap reached");
}

}  // namespace smilefx
