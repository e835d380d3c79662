#include <catch_amalgamated.hpp>

#include "smilefx/backtest.hpp"
#include "smilefx/data_io.hpp"

using namespace smilefx;
using Catch::Matchers::WithinAbs;

namespace {
Dataset constant_world(std::size_t n) {
  Dataset d;
  d.dates = io_detail::weekday_calendar("2010-01-04", n);
  d.params.assign(n, SabrParams{1.0, 0.6, -0.2});
  d.snapshots.assign(n, MarketSnapshot{100.0, 0.001, 0.02, 1.0 / 12});
  return d;
}

BacktestConfig small_config() {
  BacktestConfig cfg;
  cfg.n_fit = 300;
  cfg.n_test = 15;
  cfg.n_strikes = 9;
  return cfg;
}
}  // namespace

TEST_CASE("config validation and origins") {
  auto cfg = small_config();
  CHECK_NOTHROW(cfg.validate(318));
  CHECK_THROWS_AS(cfg.validate(317), Error);
  const auto o = cfg.origins();
  CHECK(o.front() == 299);
  CHECK(o.back() == 313);
  cfg.horizons = {1, 11};
  CHECK_THROWS_AS(cfg.validate(400), Error);
}

TEST_CASE("static world has zero error") {
  const auto data = constant_world(320);
  const auto cfg = small_config();
  const auto report = run_backtest(data, cfg);
  CHECK(report.skipped_origins.empty());
  CHECK(report.smiles_checked == cfg.n_test * cfg.horizons.size());
  for (std::size_t h = 0; h < cfg.horizons.size(); ++h)
    for (std::size_t k = 0; k < cfg.n_strikes; ++k) {
      // forecasts pass through the log/atanh transform, so allow its rounding
      CHECK_THAT(report.model_mae_bp[h][k], WithinAbs(0.0, 1e-9));
      CHECK(report.rw_mae_bp[h][k] == 0.0);
    }
}

TEST_CASE("random-walk forecasts reproduce the baseline") {
  SyntheticSpec spec;
  spec.n_days = 330;
  const auto data = generate_synthetic(spec, 11);
  const auto cfg = small_config();
  const auto report = score_backtest(data, cfg, random_walk_forecasts(data, cfg));
  CHECK(report.model_mae_bp == report.rw_mae_bp);
  CHECK(report.arbitrage_failures == 0);
}

TEST_CASE("model backtest on synthetic data") {
  SyntheticSpec spec;
  spec.n_days = 330;
  const auto data = generate_synthetic(spec, 12);
  const auto cfg = small_config();
  const auto fc = rolling_forecasts(data, cfg);
  CHECK(fc.failed_origins.empty());
  const auto report = score_backtest(data, cfg, fc);
  CHECK(report.arbitrage_failures == 0);
  CHECK(report.days.size() == cfg.n_test * 3);
  for (const auto& row : report.model_mae_bp)
    for (double v : row) CHECK(v >= 0.0);
  // forecasts at the first origin ignore everything after it
  auto truncated = data;
  truncated.dates.resize(cfg.n_fit + 4);
  truncated.params.resize(cfg.n_fit + 4);
  truncated.snapshots.resize(cfg.n_fit + 4);
  auto one = cfg;
  one.n_test = 1;
  const auto fc1 = rolling_forecasts(truncated, one);
  CHECK((*fc1.predicted[0])[0] == (*fc.predicted[0])[0]);
}

TEST_CASE("error summary") {
  BacktestReport r;
  r.horizons = {1, 2};
  r.strike_rel = {0.9, 1.1};
  r.model_mae_bp = {{0.0, 0.0}, {0.0, 0.0}};
  r.rw_mae_bp = r.model_mae_bp;
  auto s = error_summary(r);
  CHECK(s.model_mean_bp == std::vector<double>{0.0, 0.0});
  r.model_mae_bp = {{1.0, 1.0}, {1.0, 1.0}};
  s = error_summary(r);
  CHECK(s.model_mean_bp == std::vector<double>{1.0, 1.0});
  CHECK_THROWS_AS(error_summary(BacktestReport{}), Error);
}
