#pragma once

// Bijection between SABR parameters and R^3:
//   a = log(alpha), n = log(nu), r = log((1 + rho) / (1 - rho)).
// Any finite triple maps back to a valid SabrParams.

#include <algorithm>
#include <cmath>
#include <limits>

#include "smilefx/errors.hpp"
#include "smilefx/sabr.hpp"

namespace smilefx {

struct TransformedParams {
  double a = 0.0;
  double n = 0.0;
  double r = 0.0;

  bool operator==(const TransformedParams&) const = default;
};

inline TransformedParams to_unconstrained(const SabrParams& p) {
  p.validate();
  // log((1+rho)/(1-rho)) == 2 atanh(rho)
  return {std::log(p.alpha), std::log(p.nu), 2.0 * std::atanh(p.rho)};
}

inline SabrParams from_unconstrained(const TransformedParams& t) {
  if (!std::isfinite(t.a) || !std::isfinite(t.n) || !std::isfinite(t.r))
    fail(ErrorKind::InvalidInput, "transformed parameters must be finite");
  SabrParams p{std::exp(t.a), std::exp(t.n), std::tanh(0.5 * t.r)};
  // tanh rounds to +-1 once |r| exceeds ~38; step back inside the open interval.
  if (p.rho >= 1.0) p.rho = std::nextafter(1.0, 0.0);
  if (p.rho <= -1.0) p.rho = std::nextafter(-1.0, 0.0);
  // Same for exp() leaving the representable range at |a|, |n| beyond ~709.
  constexpr double tiny = std::numeric_limits<double>::denorm_min();
  constexpr double huge = std::numeric_limits<double>::max();
  p.alpha = std::clamp(p.alpha, tiny, huge);
  p.nu = std::clamp(p.nu, tiny, huge);
  return p;
}

}  // namespace smilefx
