#pragma once

// ARMA(p, q) conditional mean with GARCH(1,1) variance and standardized
// Student-t innovations:
//
//   x_t      = mu + sum_i phi_i x_{t-i} + sum_j theta_j e_{t-j} + e_t
//   s2_t     = omega + a e_{t-1}^2 + b s2_{t-1}
//   e_t/s_t  ~ t(dof) rescaled to unit variance
//
// The likelihood is conditional on the first p observations; presample
// innovations are zero and the presample variance is the sample variance of
// the series.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "smilefx/errors.hpp"
#include "smilefx/optimize.hpp"
#include "smilefx/regression.hpp"

namespace smilefx {

struct ArmaGarchSpec {
  std::size_t p = 0;
  std::size_t q = 0;
  bool include_mean = false;

  void validate() const {
    if (p > 50 || q > 50) fail(ErrorKind::InvalidInput, "ARMA orders above 50 are not supported");
  }
  std::size_t n_mean_params() const { return (include_mean ? 1 : 0) + p + q; }
  std::size_t n_params() const { return n_mean_params() + 4; }

  bool operator==(const ArmaGarchSpec&) const = default;
};

struct ArmaGarchParams {
  double mu = 0.0;
  std::vector<double> phi;
  std::vector<double> theta;
  double omega = 1.0;
  double a_arch = 0.0;
  double b_garch = 0.0;
  double dof = 8.0;

  void validate(const ArmaGarchSpec& spec) const {
    spec.validate();
    if (phi.size() != spec.p || theta.size() != spec.q)
      fail(ErrorKind::InvalidInput, "coefficient counts do not match the model orders");
    if (!spec.include_mean && mu != 0.0) fail(ErrorKind::InvalidInput, "mu set on a model without mean");
    for (double c : phi)
      if (!std::isfinite(c)) fail(ErrorKind::InvalidInput, "non-finite AR coefficient");
    for (double c : theta)
      if (!std::isfinite(c)) fail(ErrorKind::InvalidInput, "non-finite MA coefficient");
    if (!std::isfinite(mu)) fail(ErrorKind::InvalidInput, "non-finite mu");
    if (!(omega > 0.0) || !std::isfinite(omega)) fail(ErrorKind::InvalidInput, "omega must be > 0");
    if (!(a_arch >= 0.0) || !(b_garch >= 0.0)) fail(ErrorKind::InvalidInput, "GARCH coefficients must be >= 0");
    if (!(a_arch + b_garch < 1.0)) fail(ErrorKind::InvalidInput, "a + b must be < 1");
    if (!(dof > 2.0)) fail(ErrorKind::InvalidInput, "dof must be > 2");
  }

  // Natural-parameter vector: [mu], phi..., theta..., omega, a, b, dof.
  std::vector<double> to_vector(const ArmaGarchSpec& spec) const {
    std::vector<double> v;
    if (spec.include_mean) v.push_back(mu);
    v.insert(v.end(), phi.begin(), phi.end());
    v.insert(v.end(), theta.begin(), theta.end());
    v.insert(v.end(), {omega, a_arch, b_garch, dof});
    return v;
  }

  static ArmaGarchParams from_vector(const ArmaGarchSpec& spec, std::span<const double> v) {
    if (v.size() != spec.n_params()) fail(ErrorKind::InvalidInput, "parameter vector has wrong length");
    ArmaGarchParams out;
    std::size_t i = 0;
    if (spec.include_mean) out.mu = v[i++];
    out.phi.assign(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i + spec.p));
    i += spec.p;
    out.theta.assign(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i + spec.q));
    i += spec.q;
    out.omega = v[i];
    out.a_arch = v[i + 1];
    out.b_garch = v[i + 2];
    out.dof = v[i + 3];
    return out;
  }

  bool operator==(const ArmaGarchParams&) const = default;
};

inline std::vector<std::string> parameter_names(const ArmaGarchSpec& spec) {
  std::vector<std::string> names;
  if (spec.include_mean) names.emplace_back("mu");
  for (std::size_t i = 1; i <= spec.p; ++i) names.push_back("phi" + std::to_string(i));
  for (std::size_t j = 1; j <= spec.q; ++j) names.push_back("theta" + std::to_string(j));
  names.insert(names.end(), {"omega", "a_arch", "b_garch", "dof"});
  return names;
}

struct ArmaGarchFit {
  ArmaGarchSpec spec;
  ArmaGarchParams params;
  std::optional<std::vector<double>> stderrs;  // natural-parameter order; absent if the Hessian is singular
  double loglik = 0.0;
  std::vector<double> residuals;
  std::vector<double> cond_var;
  std::size_t n_obs = 0;
  int iterations = 0;
};

struct FitOptions {
  std::size_t min_obs = 100;
  int max_iter = 2000;
  double loglik_tol = 1e-8;
  double dof_floor = 2.1;
  bool compute_stderrs = true;
};

inline std::vector<double> difference(std::span<const double> levels) {
  if (levels.size() < 2) fail(ErrorKind::TooShort, "differencing needs at least 2 values");
  std::vector<double> out(levels.size() - 1);
  for (std::size_t t = 0; t + 1 < levels.size(); ++t) out[t] = levels[t + 1] - levels[t];
  return out;
}

// Inverse of difference(): cumulative sums starting from `first`.
inline std::vector<double> undifference(double first, std::span<const double> diffs) {
  std::vector<double> out;
  out.reserve(diffs.size() + 1);
  out.push_back(first);
  for (double d : diffs) out.push_back(out.back() + d);
  return out;
}

// levels[h] = last_level + sum of the first h+1 forecast differences.
inline std::vector<double> integrate_forecast(double last_level, std::span<const double> diff_means) {
  std::vector<double> out;
  out.reserve(diff_means.size());
  double level = last_level;
  for (double d : diff_means) {
    level += d;
    out.push_back(level);
  }
  return out;
}

// Log density of e with variance s2 under the unit-variance Student-t.
inline double student_t_logpdf(double e, double s2, double dof) {
  const double scale = (dof - 2.0) * s2;
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) - 0.5 * std::log(std::numbers::pi * scale) -
         0.5 * (dof + 1.0) * std::log1p(e * e / scale);
}

namespace garch_detail {

struct Filtered {
  std::vector<double> residuals;
  std::vector<double> cond_var;
  double loglik = 0.0;
};

inline double sample_variance(std::span<const double> x) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size());
}

inline void check_length(const ArmaGarchSpec& spec, std::span<const double> series) {
  if (series.size() <= spec.p + spec.q + 1)
    fail(ErrorKind::TooShort, "series must be longer than p + q + 1");
}

// Runs the mean and variance recursions. No validation: the optimiser calls
// this on every trial point and maps invalid regions to -inf itself.
inline Filtered run_filter(const ArmaGarchSpec& spec, const ArmaGarchParams& prm, std::span<const double> x,
                           bool keep_paths) {
  const std::size_t n = x.size();
  const std::size_t start = spec.p;
  const std::size_t n_obs = n - start;
  Filtered out;
  std::vector<double> eps(n_obs, 0.0);
  if (keep_paths) out.cond_var.resize(n_obs);

  const double presample_var = sample_variance(x);
  const double dof = prm.dof;
  const double log_const = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                           0.5 * std::log(std::numbers::pi * (dof - 2.0));
  const double half_dof1 = 0.5 * (dof + 1.0);
  const double inv_dof2 = 1.0 / (dof - 2.0);

  double prev_eps2 = 0.0;
  double prev_var = presample_var;
  double ll = 0.0;
  for (std::size_t k = 0; k < n_obs; ++k) {
    const std::size_t t = start + k;
    double mean = prm.mu;
    for (std::size_t i = 0; i < spec.p; ++i) mean += prm.phi[i] * x[t - 1 - i];
    for (std::size_t j = 0; j < spec.q && j < k; ++j) mean += prm.theta[j] * eps[k - 1 - j];
    const double e = x[t] - mean;
    eps[k] = e;
    const double var = prm.omega + prm.a_arch * prev_eps2 + prm.b_garch * prev_var;
    if (keep_paths) out.cond_var[k] = var;
    ll += log_const - 0.5 * std::log(var) - half_dof1 * std::log1p(e * e * inv_dof2 / var);
    prev_eps2 = e * e;
    prev_var = var;
  }
  out.loglik = ll;
  if (keep_paths) out.residuals = std::move(eps);
  return out;
}

}  // namespace garch_detail

inline double log_likelihood(const ArmaGarchSpec& spec, const ArmaGarchParams& params,
                             std::span<const double> series) {
  params.validate(spec);
  garch_detail::check_length(spec, series);
  return garch_detail::run_filter(spec, params, series, false).loglik;
}

// Residual and conditional-variance paths for given parameters.
inline ArmaGarchFit evaluate(const ArmaGarchSpec& spec, const ArmaGarchParams& params,
                             std::span<const double> series) {
  params.validate(spec);
  garch_detail::check_length(spec, series);
  auto filtered = garch_detail::run_filter(spec, params, series, true);
  ArmaGarchFit fit;
  fit.spec = spec;
  fit.params = params;
  fit.loglik = filtered.loglik;
  fit.n_obs = filtered.residuals.size();
  fit.residuals = std::move(filtered.residuals);
  fit.cond_var = std::move(filtered.cond_var);
  return fit;
}

namespace garch_detail {

// Unconstrained coordinates used by the optimiser:
//   mu / scale, phi, theta, log omega, (y1, y2) with
//   a = e^y1 / (1 + e^y1 + e^y2), b = e^y2 / (1 + e^y1 + e^y2),
//   log(dof - floor).
struct Coordinates {
  ArmaGarchSpec spec;
  double scale = 1.0;
  double dof_floor = 2.1;

  optim::Vector to_free(const ArmaGarchParams& p) const {
    optim::Vector v(static_cast<Eigen::Index>(spec.n_params()));
    Eigen::Index i = 0;
    if (spec.include_mean) v[i++] = p.mu / scale;
    for (double c : p.phi) v[i++] = c;
    for (double c : p.theta) v[i++] = c;
    const double a = std::max(p.a_arch, 1e-8);
    const double b = std::max(p.b_garch, 1e-8);
    const double rest = std::max(1.0 - a - b, 1e-8);
    v[i++] = std::log(p.omega);
    v[i++] = std::log(a / rest);
    v[i++] = std::log(b / rest);
    v[i++] = std::log(std::max(p.dof - dof_floor, 1e-8));
    return v;
  }

  ArmaGarchParams from_free(const optim::Vector& v) const {
    ArmaGarchParams p;
    Eigen::Index i = 0;
    if (spec.include_mean) p.mu = v[i++] * scale;
    for (std::size_t k = 0; k < spec.p; ++k) p.phi.push_back(v[i++]);
    for (std::size_t k = 0; k < spec.q; ++k) p.theta.push_back(v[i++]);
    p.omega = std::exp(v[i++]);
    const double y1 = v[i++];
    const double y2 = v[i++];
    // softmax over (0, y1, y2) with the usual max shift
    const double m = std::max({0.0, y1, y2});
    const double e0 = std::exp(-m);
    const double e1 = std::exp(y1 - m);
    const double e2 = std::exp(y2 - m);
    const double total = e0 + e1 + e2;
    p.a_arch = e1 / total;
    p.b_garch = e2 / total;
    p.dof = dof_floor + std::exp(v[i++]);
    return p;
  }

  std::vector<double> natural(const optim::Vector& v) const { return from_free(v).to_vector(spec); }
};

// Warm start: Hannan-Rissanen style least squares for the mean part
// (long autoregression for innovation proxies when q > 0).
inline ArmaGarchParams initial_guess(const ArmaGarchSpec& spec, std::span<const double> x) {
  ArmaGarchParams p;
  p.phi.assign(spec.p, 0.0);
  p.theta.assign(spec.q, 0.0);
  const double var = sample_variance(x);
  p.a_arch = 0.05;
  p.b_garch = 0.90;
  p.omega = (1.0 - p.a_arch - p.b_garch) * var;  // matches the sample variance
  p.dof = 8.0;

  const auto n = static_cast<Eigen::Index>(x.size());
  std::vector<double> innovations(x.begin(), x.end());
  Eigen::Index skip = 0;
  if (spec.q > 0) {
    // An MA root near -1 needs a long autoregression to whiten the series.
    const auto long_order = static_cast<Eigen::Index>(
        std::max<double>(spec.p + spec.q + 5, std::min(10.0 * std::log10(static_cast<double>(n)), std::sqrt(static_cast<double>(n)))));
    if (n > 4 * long_order + 10) {
      Eigen::MatrixXd design(n - long_order, long_order + 1);
      Eigen::VectorXd y(n - long_order);
      for (Eigen::Index t = long_order; t < n; ++t) {
        design(t - long_order, 0) = 1.0;
        for (Eigen::Index i = 1; i <= long_order; ++i) design(t - long_order, i) = x[static_cast<std::size_t>(t - i)];
        y[t - long_order] = x[static_cast<std::size_t>(t)];
      }
      try {
        const auto fit = ols(design, y);
        std::fill(innovations.begin(), innovations.end(), 0.0);
        for (Eigen::Index t = long_order; t < n; ++t)
          innovations[static_cast<std::size_t>(t)] = fit.residuals[t - long_order];
        skip = long_order;
      } catch (const Error&) {
        return p;
      }
    }
  }

  const auto lag = static_cast<Eigen::Index>(std::max(spec.p, spec.q));
  const Eigen::Index first = skip + lag;
  const Eigen::Index cols = static_cast<Eigen::Index>(spec.n_mean_params());
  if (cols == 0 || n - first <= 4 * cols + 10) return p;
  Eigen::MatrixXd design(n - first, cols);
  Eigen::VectorXd y(n - first);
  for (Eigen::Index t = first; t < n; ++t) {
    Eigen::Index c = 0;
    if (spec.include_mean) design(t - first, c++) = 1.0;
    for (std::size_t i = 1; i <= spec.p; ++i) design(t - first, c++) = x[static_cast<std::size_t>(t) - i];
    for (std::size_t j = 1; j <= spec.q; ++j) design(t - first, c++) = innovations[static_cast<std::size_t>(t) - j];
    y[t - first] = x[static_cast<std::size_t>(t)];
  }
  try {
    const auto fit = ols(design, y);
    Eigen::Index c = 0;
    if (spec.include_mean) p.mu = fit.coef[c++];
    for (std::size_t i = 0; i < spec.p; ++i) p.phi[i] = std::clamp(fit.coef[c++], -0.99, 0.99);
    for (std::size_t j = 0; j < spec.q; ++j) p.theta[j] = std::clamp(fit.coef[c++], -0.99, 0.99);
  } catch (const Error&) {
  }
  return p;
}

}  // namespace garch_detail

// Maximum likelihood by a Nelder-Mead pass followed by finite-difference
// BFGS, both in unconstrained coordinates. Standard errors come from the
// inverse numerical Hessian, mapped to natural parameters by the delta
// method.
inline ArmaGarchFit fit(const ArmaGarchSpec& spec, std::span<const double> series,
                        const std::optional<ArmaGarchParams>& init = std::nullopt, const FitOptions& opts = {}) {
  spec.validate();
  if (series.size() < opts.min_obs) fail(ErrorKind::TooShort, "series shorter than the fitting floor");
  garch_detail::check_length(spec, series);

  ArmaGarchParams start = init ? *init : garch_detail::initial_guess(spec, series);
  start.validate(spec);
  start.dof = std::max(start.dof, opts.dof_floor + 1e-3);

  garch_detail::Coordinates coords{spec, std::sqrt(garch_detail::sample_variance(series)), opts.dof_floor};
  if (!(coords.scale > 0.0)) fail(ErrorKind::DegenerateInput, "series has zero variance");

  const optim::Objective objective = [&](const optim::Vector& v) {
    if (!v.allFinite()) return std::numeric_limits<double>::infinity();
    const ArmaGarchParams p = coords.from_free(v);
    if (!(p.a_arch + p.b_garch < 1.0) || !(p.omega > 0.0)) return std::numeric_limits<double>::infinity();
    const double ll = garch_detail::run_filter(spec, p, series, false).loglik;
    return std::isfinite(ll) ? -ll : std::numeric_limits<double>::infinity();
  };

  const optim::Vector x0 = coords.to_free(start);
  const double f_start = objective(x0);
  const auto dim = static_cast<int>(spec.n_params());

  optim::NelderMeadOptions nm;
  nm.initial_step = init ? 0.02 : 0.1;
  nm.max_iter = std::min(opts.max_iter / 2, (init ? 30 : 200) * dim);
  nm.f_tol = 1e-6;
  const auto coarse = optim::nelder_mead(objective, x0, nm);

  optim::BfgsOptions qn;
  qn.max_iter = std::max(opts.max_iter - coarse.iterations, 1);
  qn.f_tol = opts.loglik_tol;
  auto refined = optim::bfgs(objective, coarse.value <= f_start ? coarse.x : x0, qn);
  // Near-cancelling AR and MA roots leave a long ridge that BFGS on noisy
  // gradients may stall on. Newton steps finish the job; the standard errors
  // need the Hessian at a genuine optimum anyway.
  if (!refined.converged || opts.compute_stderrs) {
    const auto polished = optim::newton(objective, refined.x);
    if (polished.value <= refined.value) {
      refined.x = polished.x;
      refined.value = polished.value;
    }
    refined.iterations += polished.iterations;
    refined.converged = refined.converged || polished.converged;
  }
  if (!refined.converged) fail(ErrorKind::NonConvergence, "ARMA-GARCH likelihood maximisation hit the iteration cap");
  if (!std::isfinite(refined.value)) fail(ErrorKind::NonConvergence, "likelihood is not finite at the optimum");

  ArmaGarchFit out = evaluate(spec, coords.from_free(refined.x), series);
  out.iterations = coarse.iterations + refined.iterations;

  if (opts.compute_stderrs) {
    const optim::Matrix h = optim::hessian(objective, refined.x);
    Eigen::LLT<optim::Matrix> llt(h);
    if (h.allFinite() && llt.info() == Eigen::Success) {
      const optim::Matrix cov_free = llt.solve(optim::Matrix::Identity(h.rows(), h.cols()));
      // Jacobian of the natural parameters with respect to the free ones.
      const auto n = refined.x.size();
      optim::Matrix jac(n, n);
      optim::Vector probe = refined.x;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double step = 1e-6 * std::max(1.0, std::abs(refined.x[j]));
        probe[j] = refined.x[j] + step;
        const auto up = coords.natural(probe);
        probe[j] = refined.x[j] - step;
        const auto down = coords.natural(probe);
        probe[j] = refined.x[j];
        for (Eigen::Index i = 0; i < n; ++i)
          jac(i, j) = (up[static_cast<std::size_t>(i)] - down[static_cast<std::size_t>(i)]) / (2.0 * step);
      }
      const optim::Matrix cov = jac * cov_free * jac.transpose();
      std::vector<double> se(static_cast<std::size_t>(n));
      bool ok = true;
      for (Eigen::Index i = 0; i < n; ++i) {
        ok = ok && cov(i, i) >= 0.0 && std::isfinite(cov(i, i));
        se[static_cast<std::size_t>(i)] = std::sqrt(std::max(cov(i, i), 0.0));
      }
      if (ok) out.stderrs = std::move(se);
    }
  }
  return out;
}

struct ForecastStep {
  double mean = 0.0;      // conditional mean of x_{t+h}
  double variance = 0.0;  // conditional innovation variance s2_{t+h}
};

// Multi-step forecasts from the end of `series`: future innovations are
// zero in the mean recursion and replaced by their conditional variance in
// the GARCH recursion.
inline std::vector<ForecastStep> forecast(const ArmaGarchFit& model, std::span<const double> series,
                                          std::size_t horizon) {
  if (horizon < 1 || horizon > 10) fail(ErrorKind::InvalidInput, "horizon must lie in 1..10");
  const auto& spec = model.spec;
  const auto& prm = model.params;
  const ArmaGarchFit path = evaluate(spec, prm, series);

  std::vector<double> x(series.begin(), series.end());
  std::vector<double> eps(spec.p, 0.0);
  eps.insert(eps.end(), path.residuals.begin(), path.residuals.end());
  // eps is aligned with x: eps[t] is the innovation at time t.

  std::vector<ForecastStep> out;
  out.reserve(horizon);
  const double last_e = path.residuals.back();
  double var = prm.omega + prm.a_arch * last_e * last_e + prm.b_garch * path.cond_var.back();
  for (std::size_t h = 0; h < horizon; ++h) {
    const std::size_t t = x.size();
    double mean = prm.mu;
    for (std::size_t i = 0; i < spec.p; ++i) mean += prm.phi[i] * x[t - 1 - i];
    for (std::size_t j = 0; j < spec.q; ++j) mean += prm.theta[j] * eps[t - 1 - j];
    if (h > 0) var = prm.omega + (prm.a_arch + prm.b_garch) * var;
    out.push_back({mean, var});
    x.push_back(mean);
    eps.push_back(0.0);
  }
  return out;
}

inline constexpr std::size_t simulation_burn_in = 1000;

inline std::vector<double> simulate(const ArmaGarchSpec& spec, const ArmaGarchParams& params, std::size_t n,
                                    std::uint64_t seed) {
  params.validate(spec);
  if (n < 1) fail(ErrorKind::InvalidInput, "simulation length must be >= 1");
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> student(params.dof);
  const double unit = std::sqrt((params.dof - 2.0) / params.dof);

  const std::size_t total = n + simulation_burn_in;
  const std::size_t lags = std::max(spec.p, spec.q);
  std::vector<double> x(lags + total, 0.0);
  std::vector<double> eps(lags + total, 0.0);
  double var = params.omega / (1.0 - params.a_arch - params.b_garch);
  double prev_eps2 = var;
  for (std::size_t t = lags; t < lags + total; ++t) {
    var = params.omega + params.a_arch * prev_eps2 + params.b_garch * var;
    const double e = std::sqrt(var) * unit * student(rng);
    double mean = params.mu;
    for (std::size_t i = 0; i < spec.p; ++i) mean += params.phi[i] * x[t - 1 - i];
    for (std::size_t j = 0; j < spec.q; ++j) mean += params.theta[j] * eps[t - 1 - j];
    x[t] = mean + e;
    eps[t] = e;
    prev_eps2 = e * e;
  }
  return {x.end() - static_cast<std::ptrdiff_t>(n), x.end()};
}

// Estimates reported for the USDJPY one-month series (standard errors
// alongside). The nu-equation constant prints as 0.0000; 2e-5 is used.
struct ReferenceModel {
  ArmaGarchSpec spec;
  ArmaGarchParams params;
  std::vector<double> stderrs;
};

inline ReferenceModel reference_alpha_model() {
  return {{1, 1, true},
          {-0.0002, {0.9104}, {-0.9789}, 0.0002, 0.1801, 0.7807, 3.8903},
          {0.0001, 0.0160, 0.0053, 0.0001, 0.0444, 0.0413, 0.5788}};
}

inline ReferenceModel reference_nu_model() {
  return {{5, 1, false},
          {0.0, {-0.1844, -0.2279, -0.2269, -0.1096, 0.2753}, {0.0042}, 0.00002, 0.0317, 0.9397, 6.1987},
          {0.1082, 0.0372, 0.0441, 0.0428, 0.0341, 0.1105, 0.0000, 0.0145, 0.0311, 1.3818}};
}

inline ReferenceModel reference_rho_model() {
  return {{1, 0, true},
          {0.0013, {-0.0520}, {}, 0.0004, 0.0445, 0.9262, 2.9694},
          {0.0022, 0.0273, 0.0003, 0.0249, 0.0444, 0.4177}};
}

}  // namespace smilefx
