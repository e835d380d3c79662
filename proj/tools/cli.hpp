#pragma once

// Command-line surface. run_cli() is separate from main() so the commands
// can be driven in-process by the test suite.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smilefx/smilefx.hpp"

namespace smilefx::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 1;
inline constexpr int exit_numerical = 2;

namespace detail {

using nlohmann::json;

inline std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::size_t line = 0;
  for (auto cell : io_detail::split(text)) out.push_back(io_detail::parse_double(cell, line, what));
  if (expected != 0 && out.size() != expected)
    fail(ErrorKind::InvalidInput, std::string(what) + " expects " + std::to_string(expected) + " comma-separated values");
  return out;
}

inline std::size_t series_index(const std::string& name) {
  if (name == "alpha") return 0;
  if (name == "nu") return 1;
  if (name == "rho") return 2;
  fail(ErrorKind::InvalidInput, "series must be alpha, nu or rho");
}

inline std::vector<double> transformed_levels(const Dataset& data, std::size_t which) {
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto& p : data.params) {
    const auto t = to_unconstrained(p);
    out.push_back(which == 0 ? t.a : which == 1 ? t.n : t.r);
  }
  return out;
}

inline ArmaGarchSpec default_orders(std::size_t which) {
  const SeriesOrders orders;
  return which == 0 ? orders.alpha : which == 1 ? orders.nu : orders.rho;
}

inline json fit_to_json(const ArmaGarchFit& f) {
  const auto names = parameter_names(f.spec);
  const auto values = f.params.to_vector(f.spec);
  json params = json::object();
  json stderrs = f.stderrs ? json::object() : json(nullptr);
  for (std::size_t i = 0; i < names.size(); ++i) {
    params[names[i]] = values[i];
    if (f.stderrs) stderrs[names[i]] = (*f.stderrs)[i];
  }
  const auto ic = information_criteria(f.loglik, f.spec.n_params(), static_cast<double>(f.n_obs));
  return {{"orders", {{"p", f.spec.p}, {"q", f.spec.q}, {"mean", f.spec.include_mean}}},
          {"params", params},
          {"stderrs", stderrs},
          {"loglik", f.loglik},
          {"aic", ic.aic},
          {"bic", ic.bic},
          {"n_obs", f.n_obs}};
}

inline json test_to_json(const TestResult& r) {
  return {{"statistic", r.statistic}, {"critical_values", r.critical_values}, {"reject", r.reject}};
}

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

inline std::string extension(ReportFormat f) { return f == ReportFormat::Csv ? ".csv" : ".json"; }

}  // namespace detail

inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using detail::json;
  CLI::App app{"Arbitrage-free implied-volatility smile forecasting"};
  app.require_subcommand(1);

  // simulate
  std::string sim_config;
  std::uint64_t sim_seed = 0;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Write a synthetic dataset CSV");
  simulate_cmd->add_option("--config", sim_config, "Run config (JSON)")->required();
  simulate_cmd->add_option("--seed", sim_seed, "Random seed")->required();
  simulate_cmd->add_option("--out", sim_out, "Output directory")->required();

  // fit
  std::string fit_data;
  std::string fit_series;
  std::string fit_orders;
  bool fit_mean = false;
  double fit_maturity = 1.0 / 12.0;
  auto* fit_cmd = app.add_subcommand("fit", "Fit an ARMA-GARCH-t model to one differenced parameter series");
  fit_cmd->add_option("--data", fit_data, "Dataset CSV")->required();
  fit_cmd->add_option("--series", fit_series, "alpha | nu | rho")->required();
  fit_cmd->add_option("--orders", fit_orders, "p,q")->required();
  fit_cmd->add_flag("--mean", fit_mean, "Include an intercept");
  fit_cmd->add_option("--maturity", fit_maturity, "Year fraction of the quoted options");

  // diagnose
  std::string diag_data;
  std::string diag_series;
  std::size_t diag_lags = 20;
  std::size_t arch_lags = 5;
  auto* diagnose_cmd = app.add_subcommand("diagnose", "Unit-root, ARCH and autocorrelation diagnostics");
  diagnose_cmd->add_option("--data", diag_data, "Dataset CSV")->required();
  diagnose_cmd->add_option("--series", diag_series, "alpha | nu | rho")->required();
  diagnose_cmd->add_option("--max-lag", diag_lags, "ACF/PACF lags");
  diagnose_cmd->add_option("--arch-lags", arch_lags, "ARCH-LM lags");

  // smile
  std::string smile_params;
  std::string smile_sabr;
  double spot = 0.0;
  double rd = 0.0;
  double rf = 0.0;
  double maturity = 1.0 / 12.0;
  std::string smile_strikes;
  auto* smile_cmd = app.add_subcommand("smile", "Build a SABR smile on a strike range");
  auto* params_opt = smile_cmd->add_option("--params", smile_params, "Transformed parameters a,n,r");
  auto* sabr_opt = smile_cmd->add_option("--sabr", smile_sabr, "SABR parameters alpha,nu,rho");
  params_opt->excludes(sabr_opt);
  smile_cmd->add_option("--spot", spot, "Spot")->required();
  smile_cmd->add_option("--rd", rd, "Domestic rate");
  smile_cmd->add_option("--rf", rf, "Foreign rate");
  smile_cmd->add_option("--T", maturity, "Maturity in years");
  smile_cmd->add_option("--strikes", smile_strikes, "lo,hi,n (absolute strike levels)")->required();

  // calibrate
  std::string quotes_path;
  std::string calib_initial = "1,0.5,0";
  auto* calibrate_cmd = app.add_subcommand("calibrate", "Calibrate SABR parameters to implied-vol quotes");
  calibrate_cmd->add_option("--quotes", quotes_path, "CSV with header strike,implied_vol")->required();
  calibrate_cmd->add_option("--spot", spot, "Spot")->required();
  calibrate_cmd->add_option("--rd", rd, "Domestic rate");
  calibrate_cmd->add_option("--rf", rf, "Foreign rate");
  calibrate_cmd->add_option("--T", maturity, "Maturity in years");
  calibrate_cmd->add_option("--initial", calib_initial, "Starting alpha,nu,rho");

  // forecast
  std::string fc_data;
  std::size_t fc_horizon = 1;
  auto* forecast_cmd = app.add_subcommand("forecast", "Forecast the SABR triplet from the end of a dataset");
  forecast_cmd->add_option("--data", fc_data, "Dataset CSV")->required();
  forecast_cmd->add_option("--horizon", fc_horizon, "Days ahead (1-10)")->required();
  forecast_cmd->add_option("--maturity", maturity, "Year fraction of the quoted options");

  // backtest / trade
  std::string run_config_path;
  std::string run_out;
  auto* backtest_cmd = app.add_subcommand("backtest", "Rolling out-of-sample smile forecast errors");
  backtest_cmd->add_option("--config", run_config_path, "Run config (JSON)")->required();
  backtest_cmd->add_option("--out", run_out, "Output directory")->required();
  auto* trade_cmd = app.add_subcommand("trade", "Strangle / risk-reversal threshold strategy");
  trade_cmd->add_option("--config", run_config_path, "Run config (JSON)")->required();
  trade_cmd->add_option("--out", run_out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return exit_validation;
  }

  try {
    if (simulate_cmd->parsed()) {
      auto cfg = load_run_config(sim_config);
      if (!cfg.synthetic) fail(ErrorKind::InvalidInput, "simulate needs a 'synthetic' section in the config");
      const Dataset data = generate_synthetic(*cfg.synthetic, sim_seed);
      detail::ensure_dir(sim_out);
      const auto path = std::filesystem::path(sim_out) / "dataset.csv";
      write_dataset(data, path);
      err << "wrote " << data.size() << " days to " << path.string() << "\n";
    } else if (fit_cmd->parsed()) {
      const auto which = detail::series_index(fit_series);
      const auto orders = detail::parse_list(fit_orders, 2, "--orders");
      if (orders[0] < 0 || orders[1] < 0) fail(ErrorKind::InvalidInput, "orders must be >= 0");
      const ArmaGarchSpec spec{static_cast<std::size_t>(orders[0]), static_cast<std::size_t>(orders[1]), fit_mean};
      const Dataset data = load_dataset(fit_data, fit_maturity);
      const auto diffs = difference(detail::transformed_levels(data, which));
      const auto model = fit(spec, diffs);
      json j = detail::fit_to_json(model);
      j["series"] = fit_series;
      out << j.dump(2) << "\n";
    } else if (diagnose_cmd->parsed()) {
      const auto which = detail::series_index(diag_series);
      const Dataset data = load_dataset(diag_data);
      const auto levels = detail::transformed_levels(data, which);
      const auto diffs = difference(levels);
      const auto spec = detail::default_orders(which);
      const auto model = fit(spec, diffs);
      std::vector<double> standardized(model.residuals.size());
      for (std::size_t t = 0; t < standardized.size(); ++t)
        standardized[t] = model.residuals[t] / std::sqrt(model.cond_var[t]);
      std::vector<double> raw(diffs.size());
      double mean = 0.0;
      for (double d : diffs) mean += d;
      mean /= static_cast<double>(diffs.size());
      for (std::size_t t = 0; t < diffs.size(); ++t) raw[t] = diffs[t] - mean;
      std::vector<double> squared(diffs.size());
      for (std::size_t t = 0; t < diffs.size(); ++t) squared[t] = raw[t] * raw[t];
      json j{{"series", diag_series},
             {"adf_levels", detail::test_to_json(adf_test(levels))},
             {"adf_differences", detail::test_to_json(adf_test(diffs))},
             {"arch_lm_differences", detail::test_to_json(arch_lm_test(raw, arch_lags))},
             {"arch_lm_standardized_residuals", detail::test_to_json(arch_lm_test(standardized, arch_lags))},
             {"acf_differences", acf(diffs, diag_lags)},
             {"pacf_differences", pacf(diffs, diag_lags)},
             {"acf_squared_differences", acf(squared, diag_lags)},
             {"acf_standardized_residuals", acf(standardized, diag_lags)},
             {"pacf_standardized_residuals", pacf(standardized, diag_lags)}};
      out << j.dump(2) << "\n";
    } else if (smile_cmd->parsed()) {
      SabrParams params;
      if (!smile_params.empty()) {
        const auto t = detail::parse_list(smile_params, 3, "--params");
        params = from_unconstrained({t[0], t[1], t[2]});
      } else if (!smile_sabr.empty()) {
        const auto s = detail::parse_list(smile_sabr, 3, "--sabr");
        params = {s[0], s[1], s[2]};
      } else {
        fail(ErrorKind::InvalidInput, "one of --params or --sabr is required");
      }
      const auto range = detail::parse_list(smile_strikes, 3, "--strikes");
      if (range[2] < 1 || range[2] != std::floor(range[2]))
        fail(ErrorKind::InvalidInput, "--strikes count must be a positive integer");
      const auto n = static_cast<std::size_t>(range[2]);
      std::vector<double> strikes;
      if (n == 1) {
        strikes = {range[0]};
      } else {
        if (!(range[0] > 0.0 && range[0] < range[1])) fail(ErrorKind::InvalidInput, "--strikes needs 0 < lo < hi");
        strikes = strike_band(1.0, range[0], range[1], n);
      }
      const MarketSnapshot snap{spot, rd, rf, maturity};
      const SmileGrid grid = build_smile(params, snap, strikes);
      out << "strike,vol,call\n";
      for (std::size_t i = 0; i < grid.strikes.size(); ++i)
        out << format_report(grid.strikes[i]) << ',' << format_report(grid.vols[i]) << ','
            << format_report(grid.calls[i]) << '\n';
      if (grid.strikes.size() >= 3) {
        const auto report = check_static_arbitrage(grid);
        json a{{"monotonicity_violations", report.monotonicity_violations},
               {"convexity_violations", report.convexity_violations},
               {"max_violation", report.max_violation}};
        out << "# arbitrage " << a.dump() << '\n';
      }
    } else if (calibrate_cmd->parsed()) {
      const auto table = parse_csv(read_file(quotes_path));
      if (table.header != std::vector<std::string>{"strike", "implied_vol"})
        fail(ErrorKind::ParseError, "quotes header must be 'strike,implied_vol'");
      std::vector<OptionQuote> quotes;
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].size() != 2)
          fail(ErrorKind::ParseError, "line " + std::to_string(i + 2) + ": expected 2 fields");
        quotes.push_back({io_detail::parse_double(table.rows[i][0], i + 2, "strike"),
                          io_detail::parse_double(table.rows[i][1], i + 2, "implied_vol")});
      }
      const auto init = detail::parse_list(calib_initial, 3, "--initial");
      const auto result = calibrate(quotes, {spot, rd, rf, maturity}, {init[0], init[1], init[2]});
      json j{{"alpha", result.params.alpha},
             {"nu", result.params.nu},
             {"rho", result.params.rho},
             {"objective", result.objective},
             {"iterations", result.iterations}};
      out << j.dump(2) << "\n";
    } else if (forecast_cmd->parsed()) {
      const Dataset data = load_dataset(fc_data, maturity);
      json rows = json::array();
      std::array<std::vector<double>, 3> predicted;
      for (std::size_t s = 0; s < 3; ++s) {
        const auto levels = detail::transformed_levels(data, s);
        const auto diffs = difference(levels);
        const auto model = fit(detail::default_orders(s), diffs);
        const auto steps = forecast(model, diffs, fc_horizon);
        std::vector<double> means;
        for (const auto& st : steps) means.push_back(st.mean);
        predicted[s] = integrate_forecast(levels.back(), means);
      }
      for (std::size_t h = 0; h < fc_horizon; ++h) {
        const auto p = from_unconstrained({predicted[0][h], predicted[1][h], predicted[2][h]});
        rows.push_back({{"horizon", h + 1}, {"alpha", p.alpha}, {"nu", p.nu}, {"rho", p.rho}});
      }
      out << json{{"last_date", data.dates.back()}, {"forecasts", rows}}.dump(2) << "\n";
    } else if (backtest_cmd->parsed() || trade_cmd->parsed()) {
      const RunConfig cfg = load_run_config(run_config_path);
      const Dataset data = materialise_dataset(cfg);
      detail::ensure_dir(run_out);
      if (backtest_cmd->parsed()) {
        const auto report = run_backtest(data, cfg.backtest);
        const auto path = std::filesystem::path(run_out) / ("backtest" + detail::extension(cfg.format));
        write_report(report, path, cfg.format);
        const auto summary = error_summary(report);
        for (std::size_t h = 0; h < summary.horizons.size(); ++h)
          err << "horizon " << summary.horizons[h] << ": model " << format_report(summary.model_mean_bp[h])
              << " bp, random walk " << format_report(summary.rw_mean_bp[h]) << " bp\n";
        err << "arbitrage failures: " << report.arbitrage_failures << " of " << report.smiles_checked
            << " predicted smiles; skipped days: " << report.skipped_origins.size() << "\n";
      } else {
        const auto report = run_strategy(data, cfg.backtest, cfg.strategy);
        const auto path = std::filesystem::path(run_out) / ("strategy" + detail::extension(cfg.format));
        write_report(report, path, cfg.format);
        err << "evaluated " << report.n_days << " days; skipped " << report.skipped_origins.size() << "\n";
      }
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return is_numerical(e.kind()) ? exit_numerical : exit_validation;
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return exit_validation;
  }
  return exit_ok;
}

}  // namespace smilefx::cli
