#pragma once

// Threshold trading of strangles and risk-reversals struck at K- = 0.9 S and
// K+ = 1.1 S. A structure is traded when the one-day forecast return of its
// legs clears delta; P&L is marked at the next day's constant-maturity price
// of the same strikes.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "smilefx/backtest.hpp"
#include "smilefx/dataset.hpp"
#include "smilefx/errors.hpp"
#include "smilefx/market.hpp"
#include "smilefx/sabr.hpp"

namespace smilefx {

enum class Direction : int { Short = -1, None = 0, Long = 1 };
enum class StructureKind { Strangle, RiskReversal };

inline const char* to_string(StructureKind kind) {
  return kind == StructureKind::Strangle ? "strangle" : "risk_reversal";
}

struct StructureQuote {
  double k_minus = 0.0;
  double k_plus = 0.0;
  double call_plus = 0.0;  // C(K+)
  double put_minus = 0.0;  // P(K-)
  double strangle = 0.0;
  double risk_reversal = 0.0;

  double price(StructureKind kind) const { return kind == StructureKind::Strangle ? strangle : risk_reversal; }
};

inline StructureQuote structure_prices(const SmileGrid& grid, double k_minus_rel = 0.9, double k_plus_rel = 1.1) {
  const double spot = grid.snapshot.spot;
  auto locate = [&](double rel) {
    const double target = rel * spot;
    for (std::size_t i = 0; i < grid.strikes.size(); ++i)
      if (std::abs(grid.strikes[i] - target) <= 1e-12 * target) return i;
    fail(ErrorKind::StrikeMissing, "smile grid has no strike at " + std::to_string(rel) + " x spot");
  };
  const std::size_t im = locate(k_minus_rel);
  const std::size_t ip = locate(k_plus_rel);
  const double forward = grid.forward();
  const auto& s = grid.snapshot;

  StructureQuote q;
  q.k_minus = grid.strikes[im];
  q.k_plus = grid.strikes[ip];
  q.call_plus = grid.calls[ip];
  q.put_minus = put_from_call(grid.calls[im], forward, q.k_minus, s.maturity, s.rate_dom);
  q.strangle = q.call_plus + q.put_minus;
  q.risk_reversal = q.call_plus - q.put_minus;
  return q;
}

inline StructureQuote structure_prices(const SabrParams& params, const MarketSnapshot& snapshot,
                                       double k_minus_rel = 0.9, double k_plus_rel = 1.1) {
  const double strikes[] = {k_minus_rel * snapshot.spot, k_plus_rel * snapshot.spot};
  return structure_prices(build_smile(params, snapshot, strikes), k_minus_rel, k_plus_rel);
}

struct Signals {
  Direction strangle = Direction::None;
  Direction risk_reversal = Direction::None;
};

// Long strangle when both legs are forecast to gain more than delta, short
// when both are forecast to lose more than delta. Long risk-reversal when
// the call gains and the put loses by more than delta; short is the mirror.
inline Signals generate_signal(const StructureQuote& today, const StructureQuote& predicted, double delta) {
  if (!(delta > 0.0)) fail(ErrorKind::InvalidInput, "delta must be > 0");
  if (!(today.call_plus > 0.0) || !(today.put_minus > 0.0))
    fail(ErrorKind::ZeroEntryPrice, "entry leg prices must be > 0");
  const double call_ret = (predicted.call_plus - today.call_plus) / today.call_plus;
  const double put_ret = (predicted.put_minus - today.put_minus) / today.put_minus;

  Signals s;
  if (std::min(call_ret, put_ret) > delta) {
    s.strangle = Direction::Long;
  } else if (std::max(call_ret, put_ret) < -delta) {
    s.strangle = Direction::Short;
  }
  if (call_ret > delta && put_ret < -delta) {
    s.risk_reversal = Direction::Long;
  } else if (call_ret < -delta && put_ret > delta) {
    s.risk_reversal = Direction::Short;
  }
  return s;
}

inline double trade_pnl(Direction direction, double entry, double exit) {
  return static_cast<double>(static_cast<int>(direction)) * (exit - entry);
}

struct TradeRecord {
  std::size_t day = 0;
  StructureKind kind = StructureKind::Strangle;
  Direction direction = Direction::None;
  double entry = 0.0;
  double exit = 0.0;
  double pnl = 0.0;
  double normalized_return = 0.0;  // pnl / (C(K+) + P(K-)) at entry
};

struct StrategyRow {
  double delta = 0.0;
  double avg_return = 0.0;
  double std_return = 0.0;
  double standardized = 0.0;
  double frequency = 0.0;
  std::size_t n_trades = 0;
  std::vector<TradeRecord> trades;
};

struct StrategyReport {
  std::vector<StrategyRow> strangle;
  std::vector<StrategyRow> risk_reversal;
  std::size_t n_days = 0;                   // out-of-sample days evaluated
  std::vector<std::size_t> skipped_origins;  // fit failures
  std::vector<std::size_t> untradeable_days; // an entry leg priced at zero

  const std::vector<StrategyRow>& rows(StructureKind kind) const {
    return kind == StructureKind::Strangle ? strangle : risk_reversal;
  }
};

struct StrategyConfig {
  std::vector<double> delta_grid;
  double k_minus_rel = 0.9;
  double k_plus_rel = 1.1;
};

// 20 log-spaced thresholds on [1e-6, 1e-3].
inline std::vector<double> default_delta_grid() {
  std::vector<double> out(20);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = std::pow(10.0, -6.0 + 3.0 * static_cast<double>(i) / 19.0);
  return out;
}

namespace strategy_detail {

inline void summarise(StrategyRow& row, const std::vector<double>& daily) {
  const double n = static_cast<double>(daily.size());
  row.n_trades = row.trades.size();
  if (daily.empty()) return;
  row.frequency = static_cast<double>(row.n_trades) / n;
  row.avg_return = std::accumulate(daily.begin(), daily.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : daily) ss += (r - row.avg_return) * (r - row.avg_return);
  row.std_return = daily.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  row.standardized = row.std_return > 0.0 ? row.avg_return / row.std_return : 0.0;
}

}  // namespace strategy_detail

// Replays the signal rule over every out-of-sample day for each delta. Days
// without a signal contribute a zero return.
inline StrategyReport simulate_strategy(const Dataset& data, const BacktestConfig& cfg,
                                        const ParamForecasts& forecasts, const StrategyConfig& strategy) {
  cfg.validate(data.size());
  if (strategy.delta_grid.empty()) fail(ErrorKind::InvalidInput, "delta grid is empty");
  const std::size_t n_delta = strategy.delta_grid.size();

  StrategyReport report;
  report.skipped_origins = forecasts.failed_origins;
  report.strangle.resize(n_delta);
  report.risk_reversal.resize(n_delta);
  std::vector<std::vector<double>> daily_strangle(n_delta);
  std::vector<std::vector<double>> daily_rr(n_delta);

  for (std::size_t i = 0; i < forecasts.origins.size(); ++i) {
    if (!forecasts.predicted[i]) continue;
    const std::size_t t = forecasts.origins[i];
    const auto& snap = data.snapshots[t];
    const StructureQuote today = structure_prices(data.params[t], snap, strategy.k_minus_rel, strategy.k_plus_rel);
    const StructureQuote predicted =
        structure_prices((*forecasts.predicted[i])[0], snap, strategy.k_minus_rel, strategy.k_plus_rel);

    // Next day, same strikes, same time to expiry.
    const double strikes[] = {today.k_minus, today.k_plus};
    const SmileGrid next_grid = build_smile(data.params[t + 1], data.snapshots[t + 1], strikes);
    const auto& ns = next_grid.snapshot;
    StructureQuote next;
    next.call_plus = next_grid.calls[1];
    next.put_minus = put_from_call(next_grid.calls[0], next_grid.forward(), today.k_minus, ns.maturity, ns.rate_dom);
    next.strangle = next.call_plus + next.put_minus;
    next.risk_reversal = next.call_plus - next.put_minus;

    ++report.n_days;
    const bool tradeable = today.call_plus > 0.0 && today.put_minus > 0.0;
    if (!tradeable) report.untradeable_days.push_back(t);
    const double notional = today.call_plus + today.put_minus;

    for (std::size_t d = 0; d < n_delta; ++d) {
      Signals sig;
      if (tradeable) sig = generate_signal(today, predicted, strategy.delta_grid[d]);
      auto book = [&](StructureKind kind, Direction dir, StrategyRow& row, std::vector<double>& daily) {
        if (dir == Direction::None) {
          daily.push_back(0.0);
          return;
        }
        TradeRecord rec{t, kind, dir, today.price(kind), next.price(kind), 0.0, 0.0};
        rec.pnl = trade_pnl(dir, rec.entry, rec.exit);
        rec.normalized_return = rec.pnl / notional;
        daily.push_back(rec.normalized_return);
        row.trades.push_back(rec);
      };
      book(StructureKind::Strangle, sig.strangle, report.strangle[d], daily_strangle[d]);
      book(StructureKind::RiskReversal, sig.risk_reversal, report.risk_reversal[d], daily_rr[d]);
    }
  }
  for (std::size_t d = 0; d < n_delta; ++d) {
    report.strangle[d].delta = strategy.delta_grid[d];
    report.risk_reversal[d].delta = strategy.delta_grid[d];
    strategy_detail::summarise(report.strangle[d], daily_strangle[d]);
    strategy_detail::summarise(report.risk_reversal[d], daily_rr[d]);
  }
  return report;
}

inline StrategyReport run_strategy(const Dataset& data, const BacktestConfig& cfg, const StrategyConfig& strategy) {
  return simulate_strategy(data, cfg, rolling_forecasts(data, cfg), strategy);
}

}  // namespace smilefx
