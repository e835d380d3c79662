#pragma once

// JSON run configuration shared by the simulate, backtest and trade
// commands. Exactly one of "input" (dataset CSV) or "synthetic" is given;
// synthetic runs must carry an explicit seed.
//
// {
//   "input": "data.csv",                 // or "synthetic": {...}
//   "maturity": 0.0833333,                // year fraction for CSV input
//   "seed": 7,
//   "synthetic": {"n_days": 1363, "initial": {"alpha": 1, "nu": 0.6, "rho": -0.2},
//                 "spot0": 100, "spot_vol": 0.1, "rate_dom": 0.001, "rate_for": 0.02,
//                 "maturity": 0.0833333, "start_date": "2006-09-29",
//                 "models": {"alpha": {"p": 1, "q": 1, "mean": true, "mu": ..., "phi": [...],
//                                      "theta": [...], "omega": ..., "a": ..., "b": ..., "dof": ...}}},
//   "orders": {"alpha": {"p": 1, "q": 1, "mean": true}, "nu": {...}, "rho": {...}},
//   "backtest": {"n_fit": 1000, "n_test": 360, "horizons": [1, 2, 3], "n_strikes": 40,
//                "strike_band": [0.9, 1.1], "refit_every": 1, "max_iter": 2000},
//   "strategy": {"deltas": [...], "k_minus": 0.9, "k_plus": 1.1},
//   "output_dir": "out",
//   "format": "csv"
// }

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "smilefx/backtest.hpp"
#include "smilefx/data_io.hpp"
#include "smilefx/errors.hpp"
#include "smilefx/report_io.hpp"
#include "smilefx/strategy.hpp"

namespace smilefx {

struct RunConfig {
  std::optional<std::filesystem::path> input;
  std::optional<SyntheticSpec> synthetic;
  std::optional<std::uint64_t> seed;
  double maturity = 1.0 / 12.0;
  BacktestConfig backtest;
  StrategyConfig strategy{default_delta_grid()};
  std::filesystem::path output_dir = ".";
  ReportFormat format = ReportFormat::Csv;

  void validate() const {
    if (input.has_value() == synthetic.has_value())
      fail(ErrorKind::InvalidInput, "config needs exactly one of 'input' or 'synthetic'");
    if (synthetic && !seed) fail(ErrorKind::InvalidInput, "synthetic data needs an explicit 'seed'");
    if (synthetic) synthetic->validate();
  }
};

namespace config_detail {

using nlohmann::json;

template <typename T>
T get(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    fail(ErrorKind::InvalidInput, std::string("config field '") + key + "': " + e.what());
  }
}

inline ArmaGarchSpec parse_orders(const json& j, ArmaGarchSpec fallback) {
  ArmaGarchSpec s{get<std::size_t>(j, "p", fallback.p), get<std::size_t>(j, "q", fallback.q),
                  get<bool>(j, "mean", fallback.include_mean)};
  s.validate();
  return s;
}

inline ReferenceModel parse_model(const json& j, ReferenceModel fallback) {
  ReferenceModel m = fallback;
  const auto spec = parse_orders(j, fallback.spec);
  if (!(spec == fallback.spec)) {
    m.spec = spec;
    m.params.phi.assign(spec.p, 0.0);
    m.params.theta.assign(spec.q, 0.0);
    if (!spec.include_mean) m.params.mu = 0.0;
  }
  m.params.mu = get<double>(j, "mu", m.params.mu);
  m.params.phi = get<std::vector<double>>(j, "phi", m.params.phi);
  m.params.theta = get<std::vector<double>>(j, "theta", m.params.theta);
  m.params.omega = get<double>(j, "omega", m.params.omega);
  m.params.a_arch = get<double>(j, "a", m.params.a_arch);
  m.params.b_garch = get<double>(j, "b", m.params.b_garch);
  m.params.dof = get<double>(j, "dof", m.params.dof);
  m.params.validate(m.spec);
  return m;
}

inline SyntheticSpec parse_synthetic(const json& j) {
  SyntheticSpec s;
  s.n_days = get<std::size_t>(j, "n_days", s.n_days);
  if (j.contains("initial")) {
    const auto& init = j.at("initial");
    s.initial = {get<double>(init, "alpha", s.initial.alpha), get<double>(init, "nu", s.initial.nu),
                 get<double>(init, "rho", s.initial.rho)};
  }
  s.spot0 = get<double>(j, "spot0", s.spot0);
  s.spot_vol = get<double>(j, "spot_vol", s.spot_vol);
  s.rate_dom = get<double>(j, "rate_dom", s.rate_dom);
  s.rate_for = get<double>(j, "rate_for", s.rate_for);
  s.maturity = get<double>(j, "maturity", s.maturity);
  s.start_date = get<std::string>(j, "start_date", s.start_date);
  if (j.contains("models")) {
    const auto& models = j.at("models");
    if (models.contains("alpha")) s.alpha_model = parse_model(models.at("alpha"), s.alpha_model);
    if (models.contains("nu")) s.nu_model = parse_model(models.at("nu"), s.nu_model);
    if (models.contains("rho")) s.rho_model = parse_model(models.at("rho"), s.rho_model);
  }
  s.validate();
  return s;
}

}  // namespace config_detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
  using config_detail::get;
  if (!j.is_object()) fail(ErrorKind::InvalidInput, "config must be a JSON object");
  RunConfig cfg;
  if (j.contains("input")) cfg.input = get<std::string>(j, "input", "");
  if (j.contains("synthetic")) cfg.synthetic = config_detail::parse_synthetic(j.at("synthetic"));
  if (j.contains("seed")) cfg.seed = get<std::uint64_t>(j, "seed", 0);
  cfg.maturity = get<double>(j, "maturity", cfg.maturity);

  if (j.contains("orders")) {
    const auto& o = j.at("orders");
    auto& orders = cfg.backtest.orders;
    if (o.contains("alpha")) orders.alpha = config_detail::parse_orders(o.at("alpha"), orders.alpha);
    if (o.contains("nu")) orders.nu = config_detail::parse_orders(o.at("nu"), orders.nu);
    if (o.contains("rho")) orders.rho = config_detail::parse_orders(o.at("rho"), orders.rho);
  }
  if (j.contains("backtest")) {
    const auto& b = j.at("backtest");
    auto& bt = cfg.backtest;
    bt.n_fit = get<std::size_t>(b, "n_fit", bt.n_fit);
    bt.n_test = get<std::size_t>(b, "n_test", bt.n_test);
    bt.horizons = get<std::vector<std::size_t>>(b, "horizons", bt.horizons);
    bt.n_strikes = get<std::size_t>(b, "n_strikes", bt.n_strikes);
    const auto band = get<std::vector<double>>(b, "strike_band", {bt.band_lo, bt.band_hi});
    if (band.size() != 2) fail(ErrorKind::InvalidInput, "strike_band must have two entries");
    bt.band_lo = band[0];
    bt.band_hi = band[1];
    bt.refit_every = get<std::size_t>(b, "refit_every", bt.refit_every);
    bt.fit_options.max_iter = get<int>(b, "max_iter", bt.fit_options.max_iter);
  }
  if (j.contains("strategy")) {
    const auto& s = j.at("strategy");
    cfg.strategy.delta_grid = get<std::vector<double>>(s, "deltas", cfg.strategy.delta_grid);
    cfg.strategy.k_minus_rel = get<double>(s, "k_minus", cfg.strategy.k_minus_rel);
    cfg.strategy.k_plus_rel = get<double>(s, "k_plus", cfg.strategy.k_plus_rel);
  }
  cfg.output_dir = get<std::string>(j, "output_dir", cfg.output_dir.string());
  cfg.format = parse_report_format(get<std::string>(j, "format", "csv"));
  cfg.validate();
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  auto cfg = parse_run_config(j);
  // Relative input paths resolve against the config file's directory.
  if (cfg.input && cfg.input->is_relative()) cfg.input = path.parent_path() / *cfg.input;
  return cfg;
}

// The dataset a config describes.
inline Dataset materialise_dataset(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.input) return load_dataset(*cfg.input, cfg.maturity);
  return generate_synthetic(*cfg.synthetic, *cfg.seed);
}

}  // namespace smilefx
