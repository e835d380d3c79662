#pragma once

// SABR implied-volatility smile with beta fixed at 1/2, smile grids over
// strikes, and the static no-arbitrage check on call prices.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "smilefx/errors.hpp"
#include "smilefx/market.hpp"

namespace smilefx {

struct SabrParams {
  double alpha = 1.0;  // instantaneous vol level
  double nu = 0.5;     // vol of vol
  double rho = 0.0;    // correlation

  bool is_valid() const {
    return alpha > 0.0 && nu > 0.0 && rho > -1.0 && rho < 1.0 && std::isfinite(alpha) && std::isfinite(nu);
  }

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidInput, "alpha must be > 0");
    if (!(nu > 0.0) || !std::isfinite(nu)) fail(ErrorKind::InvalidInput, "nu must be > 0");
    if (!(rho > -1.0 && rho < 1.0)) fail(ErrorKind::InvalidInput, "rho must lie in (-1, 1)");
  }

  bool operator==(const SabrParams&) const = default;
};

namespace sabr_constants {
// Coefficients of the beta = 1/2 expansion, kept in the printed form.
inline constexpr double alpha_sq = 1.0 / (4.0 * 24.0);         // alpha^2 / (FK)^{1/2}
inline constexpr double rho_nu_alpha = 1.0 / 4.0;              // times (rho nu alpha / 2) / (FK)^{1/4}
inline constexpr double rho_nu_alpha_half = 1.0 / 2.0;
inline constexpr double nu_sq_denominator = 24.0;              // (2 - 3 rho^2) nu^2 / 24
inline constexpr double log_sq = 1.0 / (4.0 * 24.0);           // log^2(F/K)
inline constexpr double log_quart = 1.0 / (16.0 * 1920.0);     // log^4(F/K)
inline constexpr double z_switch = 1e-6;                       // |z| below this uses the series
}  // namespace sabr_constants

namespace sabr_detail {

// x(z) = log{(sqrt(1 - 2 rho z + z^2) + z - rho) / (1 - rho)}, written through
// log1p on either side of zero so neither small z nor large negative z
// cancels.
inline double x_of_z(double z, double rho) {
  const double root = std::sqrt(1.0 - 2.0 * rho * z + z * z);
  const double root_minus_one = (z * z - 2.0 * rho * z) / (root + 1.0);
  if (z >= 0.0) return std::log1p((z + root_minus_one) / (1.0 - rho));
  return -std::log1p((root_minus_one - z) / (1.0 + rho));
}

inline double z_over_x_direct(double z, double rho) { return z / x_of_z(z, rho); }

inline double z_over_x_series(double z, double rho) {
  return 1.0 - 0.5 * rho * z + (2.0 - 3.0 * rho * rho) * z * z / 12.0;
}

inline double z_over_x(double z, double rho) {
  return std::abs(z) < sabr_constants::z_switch ? z_over_x_series(z, rho) : z_over_x_direct(z, rho);
}

}  // namespace sabr_detail

inline double sabr_vol(const SabrParams& params, double forward, double strike, double maturity) {
  params.validate();
  detail::check_contract(forward, strike, maturity);
  namespace c = sabr_constants;
  const auto [alpha, nu, rho] = params;
  const double fk = forward * strike;
  const double fk_quarter = std::sqrt(std::sqrt(fk));
  const double log_fk = std::log(forward / strike);
  const double log_fk2 = log_fk * log_fk;

  const double correction = 1.0 + maturity * (c::alpha_sq * alpha * alpha / std::sqrt(fk) +
                                               c::rho_nu_alpha * (rho * nu * alpha * c::rho_nu_alpha_half) / fk_quarter +
                                               (2.0 - 3.0 * rho * rho) / c::nu_sq_denominator * nu * nu);
  const double denominator = fk_quarter * (1.0 + c::log_sq * log_fk2 + c::log_quart * log_fk2 * log_fk2);
  const double z = nu / alpha * fk_quarter * log_fk;
  return alpha * correction / denominator * sabr_detail::z_over_x(z, rho);
}

// At-the-money closed form (K = F).
inline double sabr_atm_vol(const SabrParams& params, double forward, double maturity) {
  const auto [alpha, nu, rho] = params;
  const double root_f = std::sqrt(forward);
  return alpha *
         (1.0 + maturity * (alpha * alpha / (96.0 * forward) + rho * nu * alpha / (8.0 * root_f) +
                            (2.0 - 3.0 * rho * rho) * nu * nu / 24.0)) /
         root_f;
}

struct SmileGrid {
  MarketSnapshot snapshot;
  std::vector<double> strikes;
  std::vector<double> vols;
  std::vector<double> calls;

  double forward() const { return forward_rate(snapshot); }
};

inline void check_strikes(std::span<const double> strikes) {
  if (strikes.empty()) fail(ErrorKind::InvalidInput, "strike list is empty");
  for (std::size_t i = 0; i < strikes.size(); ++i) {
    if (!(strikes[i] > 0.0) || !std::isfinite(strikes[i]))
      fail(ErrorKind::InvalidInput, "strikes must be > 0");
    if (i > 0 && !(strikes[i] > strikes[i - 1]))
      fail(ErrorKind::InvalidInput, "strikes must be strictly increasing");
  }
}

// n points equally spaced on [lo, hi] * spot; both endpoints exact.
inline std::vector<double> strike_band(double spot, double lo, double hi, std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidInput, "strike count must be positive");
  if (n == 1) return {lo * spot};
  if (!(lo < hi)) fail(ErrorKind::InvalidInput, "strike band must be ordered");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = (lo + (hi - lo) * w) * spot;
  }
  out.front() = lo * spot;
  out.back() = hi * spot;
  return out;
}

inline SmileGrid build_smile(const SabrParams& params, const MarketSnapshot& snapshot,
                             std::span<const double> strikes) {
  check_strikes(strikes);
  const double forward = forward_rate(snapshot);
  SmileGrid grid{snapshot, {strikes.begin(), strikes.end()}, {}, {}};
  grid.vols.reserve(strikes.size());
  grid.calls.reserve(strikes.size());
  for (double k : strikes) {
    const double vol = sabr_vol(params, forward, k, snapshot.maturity);
    grid.vols.push_back(vol);
    grid.calls.push_back(bs_call(forward, k, snapshot.maturity, vol, snapshot.rate_dom));
  }
  return grid;
}

struct ArbitrageReport {
  std::vector<std::array<std::size_t, 2>> monotonicity_violations;
  std::vector<std::array<std::size_t, 3>> convexity_violations;
  double max_violation = 0.0;  // price units

  bool clean() const { return monotonicity_violations.empty() && convexity_violations.empty(); }
};

// Calls must be non-increasing and convex in strike. The second difference
// of a triple is 2 * (w C[i] + (1 - w) C[i+2] - C[i+1]) with the linear
// interpolation weight w, which reduces to C[i] - 2 C[i+1] + C[i+2] on a
// uniform grid.
inline ArbitrageReport check_static_arbitrage(const SmileGrid& grid) {
  const auto& k = grid.strikes;
  const auto& c = grid.calls;
  if (k.size() != c.size()) fail(ErrorKind::InvalidInput, "strike and call counts differ");
  if (k.size() < 3) fail(ErrorKind::TooShort, "convexity check needs at least 3 strikes");
  check_strikes(k);
  const double tol = 1e-10 * grid.forward();

  ArbitrageReport report;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    const double rise = c[i + 1] - c[i];
    if (rise > tol) {
      report.monotonicity_violations.push_back({i, i + 1});
      report.max_violation = std::max(report.max_violation, rise);
    }
  }
  for (std::size_t i = 0; i + 2 < k.size(); ++i) {
    const double w = (k[i + 2] - k[i + 1]) / (k[i + 2] - k[i]);
    const double second = 2.0 * (w * c[i] + (1.0 - w) * c[i + 2] - c[i + 1]);
    if (second < -tol) {
      report.convexity_violations.push_back({i, i + 1, i + 2});
      report.max_violation = std::max(report.max_violation, -second);
    }
  }
  return report;
}

}  // namespace smilefx
