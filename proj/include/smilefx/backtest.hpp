#pragma once

// Rolling out-of-sample experiment. At each forecast origin the three
// transformed-parameter series are refitted on all history, forecast 1..H
// days ahead, integrated and mapped back to SABR parameters. Predicted
// smiles use the origin day's spot and rates (random walk for the forward)
// and are scored against the realised smile at the same strikes.

#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <numeric>
#include <optional>
#include <vector>

#include "smilefx/arma_garch.hpp"
#include "smilefx/dataset.hpp"
#include "smilefx/errors.hpp"
#include "smilefx/sabr.hpp"
#include "smilefx/transform.hpp"

namespace smilefx {

inline constexpr double vol_bp = 1e4;  // basis points per unit of vol

struct SeriesOrders {
  ArmaGarchSpec alpha{1, 1, true};
  ArmaGarchSpec nu{5, 1, false};
  ArmaGarchSpec rho{1, 0, true};
};

struct BacktestConfig {
  std::size_t n_fit = 1000;
  std::size_t n_test = 360;
  std::vector<std::size_t> horizons{1, 2, 3};
  std::size_t n_strikes = 40;
  double band_lo = 0.90;
  double band_hi = 1.10;
  SeriesOrders orders;
  std::size_t refit_every = 1;
  FitOptions fit_options{.min_obs = 100, .max_iter = 2000, .loglik_tol = 1e-8, .dof_floor = 2.1,
                         .compute_stderrs = false};

  std::size_t max_horizon() const { return horizons.empty() ? 0 : *std::max_element(horizons.begin(), horizons.end()); }

  void validate(std::size_t data_length) const {
    if (horizons.empty()) fail(ErrorKind::InvalidInput, "at least one horizon is required");
    for (auto h : horizons)
      if (h < 1 || h > 10) fail(ErrorKind::InvalidInput, "horizons must lie in 1..10");
    if (n_fit < 2 || n_test < 1) fail(ErrorKind::InvalidInput, "n_fit >= 2 and n_test >= 1 required");
    if (n_strikes < 3) fail(ErrorKind::InvalidInput, "n_strikes must be >= 3");
    if (!(band_lo > 0.0 && band_lo < band_hi)) fail(ErrorKind::InvalidInput, "strike band must be ordered and positive");
    if (refit_every < 1) fail(ErrorKind::InvalidInput, "refit_every must be >= 1");
    orders.alpha.validate();
    orders.nu.validate();
    orders.rho.validate();
    if (n_fit + n_test + max_horizon() > data_length)
      fail(ErrorKind::TooShort, "dataset has " + std::to_string(data_length) + " days; n_fit + n_test + max horizon = " +
                                    std::to_string(n_fit + n_test + max_horizon()));
  }

  // Forecast origins: day indices whose history (days 0..t) is used to fit.
  std::vector<std::size_t> origins() const {
    std::vector<std::size_t> out(n_test);
    std::iota(out.begin(), out.end(), n_fit - 1);
    return out;
  }
};

struct ParamForecasts {
  std::vector<std::size_t> origins;
  std::vector<std::optional<std::vector<SabrParams>>> predicted;  // [origin][h - 1], empty on fit failure
  std::vector<std::size_t> failed_origins;
};

namespace backtest_detail {

using LevelPaths = std::vector<std::optional<std::vector<double>>>;

// Forecast levels of one transformed series at every origin.
inline LevelPaths forecast_series(const std::vector<double>& levels, const ArmaGarchSpec& spec,
                                  const BacktestConfig& cfg) {
  const auto origins = cfg.origins();
  const std::size_t horizon = cfg.max_horizon();
  LevelPaths out(origins.size());
  std::optional<ArmaGarchParams> current;
  for (std::size_t i = 0; i < origins.size(); ++i) {
    const std::size_t t = origins[i];
    const std::vector<double> diffs = difference(std::span(levels).first(t + 1));
    if (garch_detail::sample_variance(diffs) == 0.0) {
      // A constant series has nothing to fit; its forecast is the constant.
      out[i] = integrate_forecast(levels[t], std::vector<double>(horizon, diffs.back()));
      continue;
    }
    try {
      ArmaGarchFit model;
      if (i % cfg.refit_every == 0 || !current) {
        model = fit(spec, diffs, current, cfg.fit_options);
        current = model.params;
      } else {
        model = evaluate(spec, *current, diffs);
      }
      const auto steps = forecast(model, diffs, horizon);
      std::vector<double> means;
      for (const auto& s : steps) means.push_back(s.mean);
      out[i] = integrate_forecast(levels[t], means);
    } catch (const Error&) {
      out[i] = std::nullopt;
    }
  }
  return out;
}

}  // namespace backtest_detail

// ARMA-GARCH forecasts for every origin; the three series are fitted
// concurrently and each refit warm-starts at the previous optimum.
inline ParamForecasts rolling_forecasts(const Dataset& data, const BacktestConfig& cfg) {
  data.validate();
  cfg.validate(data.size());
  std::array<std::vector<double>, 3> levels;
  for (const auto& p : data.params) {
    const auto t = to_unconstrained(p);
    levels[0].push_back(t.a);
    levels[1].push_back(t.n);
    levels[2].push_back(t.r);
  }
  const std::array<ArmaGarchSpec, 3> specs{cfg.orders.alpha, cfg.orders.nu, cfg.orders.rho};
  std::array<std::future<backtest_detail::LevelPaths>, 3> jobs;
  for (std::size_t s = 0; s < 3; ++s)
    jobs[s] = std::async(std::launch::async, [&, s] { return backtest_detail::forecast_series(levels[s], specs[s], cfg); });
  std::array<backtest_detail::LevelPaths, 3> paths;
  for (std::size_t s = 0; s < 3; ++s) paths[s] = jobs[s].get();

  ParamForecasts out;
  out.origins = cfg.origins();
  out.predicted.resize(out.origins.size());
  for (std::size_t i = 0; i < out.origins.size(); ++i) {
    if (!paths[0][i] || !paths[1][i] || !paths[2][i]) {
      out.failed_origins.push_back(out.origins[i]);
      continue;
    }
    std::vector<SabrParams> per_h;
    for (std::size_t h = 0; h < cfg.max_horizon(); ++h)
      per_h.push_back(from_unconstrained({(*paths[0][i])[h], (*paths[1][i])[h], (*paths[2][i])[h]}));
    out.predicted[i] = std::move(per_h);
  }
  return out;
}

// Tomorrow's parameters equal today's.
inline ParamForecasts random_walk_forecasts(const Dataset& data, const BacktestConfig& cfg) {
  data.validate();
  cfg.validate(data.size());
  ParamForecasts out;
  out.origins = cfg.origins();
  for (auto t : out.origins) out.predicted.emplace_back(std::vector<SabrParams>(cfg.max_horizon(), data.params[t]));
  return out;
}

struct DayErrors {
  std::size_t origin = 0;
  std::size_t horizon = 0;
  std::vector<double> model_bp;
  std::vector<double> rw_bp;
};

struct BacktestReport {
  std::vector<std::size_t> horizons;
  std::vector<double> strike_rel;                   // strike / spot on the prediction day
  std::vector<std::vector<double>> model_mae_bp;    // [horizon index][strike index]
  std::vector<std::vector<double>> rw_mae_bp;
  std::vector<DayErrors> days;
  std::vector<std::size_t> skipped_origins;
  std::size_t smiles_checked = 0;
  std::size_t arbitrage_failures = 0;               // predicted smiles with a non-empty arbitrage report
};

inline BacktestReport score_backtest(const Dataset& data, const BacktestConfig& cfg, const ParamForecasts& forecasts) {
  cfg.validate(data.size());
  BacktestReport report;
  report.horizons = cfg.horizons;
  const auto rel = strike_band(1.0, cfg.band_lo, cfg.band_hi, cfg.n_strikes);
  report.strike_rel = rel;
  report.skipped_origins = forecasts.failed_origins;
  const std::size_t n_h = cfg.horizons.size();
  report.model_mae_bp.assign(n_h, std::vector<double>(cfg.n_strikes, 0.0));
  report.rw_mae_bp.assign(n_h, std::vector<double>(cfg.n_strikes, 0.0));
  std::vector<std::size_t> counts(n_h, 0);

  for (std::size_t i = 0; i < forecasts.origins.size(); ++i) {
    if (!forecasts.predicted[i]) continue;
    const std::size_t t = forecasts.origins[i];
    const auto& today = data.snapshots[t];
    const auto strikes = strike_band(today.spot, cfg.band_lo, cfg.band_hi, cfg.n_strikes);
    const SmileGrid baseline = build_smile(data.params[t], today, strikes);
    for (std::size_t hi = 0; hi < n_h; ++hi) {
      const std::size_t h = cfg.horizons[hi];
      const SmileGrid predicted = build_smile((*forecasts.predicted[i])[h - 1], today, strikes);
      const SmileGrid realised = build_smile(data.params[t + h], data.snapshots[t + h], strikes);
      ++report.smiles_checked;
      if (!check_static_arbitrage(predicted).clean()) ++report.arbitrage_failures;

      DayErrors day{t, h, std::vector<double>(cfg.n_strikes), std::vector<double>(cfg.n_strikes)};
      for (std::size_t k = 0; k < cfg.n_strikes; ++k) {
        day.model_bp[k] = std::abs(predicted.vols[k] - realised.vols[k]) * vol_bp;
        day.rw_bp[k] = std::abs(baseline.vols[k] - realised.vols[k]) * vol_bp;
        report.model_mae_bp[hi][k] += day.model_bp[k];
        report.rw_mae_bp[hi][k] += day.rw_bp[k];
      }
      ++counts[hi];
      report.days.push_back(std::move(day));
    }
  }
  for (std::size_t hi = 0; hi < n_h; ++hi) {
    if (counts[hi] == 0) continue;
    for (std::size_t k = 0; k < cfg.n_strikes; ++k) {
      report.model_mae_bp[hi][k] /= static_cast<double>(counts[hi]);
      report.rw_mae_bp[hi][k] /= static_cast<double>(counts[hi]);
    }
  }
  return report;
}

inline BacktestReport run_backtest(const Dataset& data, const BacktestConfig& cfg) {
  return score_backtest(data, cfg, rolling_forecasts(data, cfg));
}

struct ErrorSummary {
  std::vector<std::size_t> horizons;
  std::vector<double> model_mean_bp;
  std::vector<double> rw_mean_bp;
};

// Grand mean over strikes and days per horizon.
inline ErrorSummary error_summary(const BacktestReport& report) {
  if (report.horizons.empty() || report.model_mae_bp.empty())
    fail(ErrorKind::InvalidInput, "backtest report is empty");
  ErrorSummary out;
  out.horizons = report.horizons;
  for (std::size_t hi = 0; hi < report.horizons.size(); ++hi) {
    const auto& m = report.model_mae_bp[hi];
    const auto& r = report.rw_mae_bp[hi];
    const double n = static_cast<double>(m.size());
    out.model_mean_bp.push_back(std::accumulate(m.begin(), m.end(), 0.0) / n);
    out.rw_mean_bp.push_back(std::accumulate(r.begin(), r.end(), 0.0) / n);
  }
  return out;
}

}  // namespace smilefx
