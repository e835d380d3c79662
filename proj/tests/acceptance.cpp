// Acceptance run: one PASS/FAIL line per criterion, then a summary line.
// Usage: acceptance <path-to-smilefx-cli> [--quick]
// The exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "smilefx/smilefx.hpp"
#include "support/forecast_oracle.hpp"

using namespace smilefx;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& text) {
  std::printf("     %s\n", text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Shared by several criteria: the default synthetic experiment per seed.
struct SeedRun {
  Dataset data;
  ParamForecasts forecasts;
  BacktestReport report;
  double seconds = 0.0;
};

SeedRun run_seed(std::uint64_t seed) {
  SeedRun out;
  const auto t0 = Clock::now();
  out.data = generate_synthetic(SyntheticSpec{}, seed);
  const BacktestConfig cfg;
  out.forecasts = rolling_forecasts(out.data, cfg);
  out.report = score_backtest(out.data, cfg, out.forecasts);
  out.seconds = seconds_since(t0);
  return out;
}

void arbitrage_free(const SeedRun& run) {
  const auto& r = run.report;
  const bool ok = r.arbitrage_failures == 0 && r.smiles_checked == 360 * 3 && run.seconds < 600.0;
  report(ok, "arbitrage-free predicted smiles",
         fmt("%zu of %zu predicted smiles violate static arbitrage (40 strikes, 360 origins, h=1..3); "
             "%zu origins skipped; full backtest %.1f s (limit 600 s)",
             r.arbitrage_failures, r.smiles_checked, r.skipped_origins.size(), run.seconds));
}

void implied_vol_roundtrip() {
  // sigma in [0.01, 2], K/F in [0.5, 2], T in [1 week, 2 years]
  auto lin = [](double a, double b, int n, int i) { return a + (b - a) * i / (n - 1); };
  const double F = 100.0;
  const double rd = 0.01;
  int points = 0;
  int passed = 0;
  int at_bound = 0;
  int inexact = 0;
  int unresolvable = 0;  // failures where the price cannot distinguish sigma +- 1e-8
  double worst = 0.0;
  const auto t0 = Clock::now();
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j)
      for (int k = 0; k < 5; ++k) {
        const double sigma = lin(0.01, 2.0, 10, i);
        const double K = F * lin(0.5, 2.0, 10, j);
        const double T = lin(1.0 / 52.0, 2.0, 5, k);
        ++points;
        const double c = bs_call(F, K, T, sigma, rd);
        bool ok = false;
        try {
          const double err = std::abs(implied_vol(c, F, K, T, rd) - sigma);
          worst = std::max(worst, err);
          ok = err < 1e-8;
          if (!ok) ++inexact;
        } catch (const Error&) {
          ++at_bound;
        }
        passed += ok;
        if (!ok) {
          // Half an ulp of the price, translated to vol through vega.
          const double resolution = 0.5 * (std::nextafter(c, 2.0 * c) - c) / bs_vega(F, K, T, sigma, rd);
          unresolvable += resolution > 1e-8 || bs_call(F, K, T, sigma + 1e-8, rd) == c;
        }
      }
  const double elapsed = seconds_since(t0);
  report(passed == points && elapsed < 1.0, "implied-vol roundtrip",
         fmt("%d of %d grid points within 1e-8 (worst finite error %.3g); %d priced exactly at the no-arbitrage "
             "bound, %d inexact; %.4f s (limit 1 s)",
             passed, points, worst, at_bound, inexact, elapsed));
  if (passed != points)
    info(fmt("%d of the %d misses are deep in-the-money short-dated calls whose time value is below the price's "
             "rounding unit: half an ulp of the call price exceeds 1e-8 in vol",
             unresolvable, points - passed));
}

void sabr_correctness() {
  std::mt19937_64 rng(20240101);
  std::uniform_real_distribution<double> alpha(0.01, 3.0), nu(0.01, 2.0), rho(-0.99, 0.99), fwd(1.0, 200.0),
      tenor(0.01, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SabrParams p{alpha(rng), nu(rng), rho(rng)};
    const double F = fwd(rng), T = tenor(rng);
    worst = std::max(worst, std::abs(sabr_vol(p, F, F, T) - sabr_atm_vol(p, F, T)));
  }
  // independent high-precision transcription (tests/oracles/golden.py)
  struct Golden { SabrParams p; double F, K, T, value; };
  const Golden golden[] = {
      {{1.0, 0.5, -0.2}, 100.0, 90.0, 1.0 / 12, 0.11163419907596007065},
      {{1.0, 0.5, -0.2}, 100.0, 110.0, 1.0 / 12, 0.096874434260225991453},
      {{0.1, 1e-12, 0.0}, 1.0, 1.0, 1.0, 0.10001041666666667222}};
  double golden_worst = 0.0;
  for (const auto& g : golden) golden_worst = std::max(golden_worst, std::abs(sabr_vol(g.p, g.F, g.K, g.T) - g.value));
  report(worst < 1e-12 && golden_worst < 1e-10, "SABR correctness",
         fmt("ATM max |formula - closed form| = %.3g over 1000 draws (limit 1e-12); golden max error %.3g (limit 1e-10)",
             worst, golden_worst));
}

struct RecoveryOutcome {
  std::vector<ArmaGarchFit> fits;
  std::vector<std::vector<double>> series;
};

void mle_recovery(std::vector<RecoveryOutcome>& outcomes) {
  const auto t0 = Clock::now();
  const ReferenceModel models[] = {reference_alpha_model(), reference_nu_model(), reference_rho_model()};
  const char* names[] = {"alpha", "nu", "rho"};
  std::string detail;
  bool ok = true;
  for (std::size_t m = 0; m < 3; ++m) {
    const auto& ref = models[m];
    const auto truth = ref.params.to_vector(ref.spec);
    int good = 0;
    RecoveryOutcome outcome;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto x = simulate(ref.spec, ref.params, 20000, 10000 + 100 * m + seed);
      bool all_within = false;
      try {
        const auto f = fit(ref.spec, x);
        if (f.stderrs) {
          all_within = true;
          const auto est = f.params.to_vector(ref.spec);
          for (std::size_t i = 0; i < truth.size(); ++i)
            all_within = all_within && std::abs(est[i] - truth[i]) <= 3.0 * (*f.stderrs)[i];
        }
        outcome.fits.push_back(f);
        outcome.series.push_back(std::move(x));
      } catch (const Error& e) {
        info(fmt("%s seed %llu: %s", names[m], static_cast<unsigned long long>(seed), e.what()));
      }
      good += all_within;
    }
    outcomes.push_back(std::move(outcome));
    ok = ok && good >= 19;
    detail += fmt("%s %d/20, ", names[m], good);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 300.0;
  report(ok, "MLE recovery", detail + fmt("n=20000 each; %.1f s (limit 300 s)", elapsed));
}

void forecast_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> order_p(0, 5), order_q(0, 3), coin(0, 1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), pos(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    ArmaGarchSpec spec{static_cast<std::size_t>(order_p(rng)), static_cast<std::size_t>(order_q(rng)), coin(rng) == 1};
    ArmaGarchParams prm;
    prm.mu = spec.include_mean ? 0.01 * unit(rng) : 0.0;
    // coefficients scaled so the AR polynomial stays stationary
    for (std::size_t i = 0; i < spec.p; ++i) prm.phi.push_back(0.9 * unit(rng) / static_cast<double>(spec.p));
    for (std::size_t j = 0; j < spec.q; ++j) prm.theta.push_back(0.9 * unit(rng) / static_cast<double>(spec.q));
    prm.omega = 1e-4 * (0.1 + pos(rng));
    prm.a_arch = 0.3 * pos(rng);
    prm.b_garch = (0.99 - prm.a_arch) * pos(rng);
    prm.dof = 2.5 + 20.0 * pos(rng);
    const auto x = simulate(spec, prm, 300, 5000 + static_cast<std::uint64_t>(s));
    const auto model = evaluate(spec, prm, x);
    const oracle::Model m{spec.p, spec.q, prm.mu, prm.phi, prm.theta, prm.omega, prm.a_arch, prm.b_garch};
    for (std::size_t H = 1; H <= 10; ++H) {
      const auto steps = forecast(model, x, H);
      const auto [means, vars] = oracle::forecast(m, x, H);
      for (std::size_t h = 0; h < H; ++h) {
        worst = std::max(worst, std::abs(steps[h].mean - means[h]) / std::max(1.0, std::abs(means[h])));
        worst = std::max(worst, std::abs(steps[h].variance - vars[h]) / std::max(1.0, std::abs(vars[h])));
      }
    }
  }
  report(worst <= 1e-12, "forecast oracle equivalence",
         fmt("max discrepancy %.3g over 100 random specs, H=1..10 (limit 1e-12)", worst));
}

void backtest_sanity(const std::vector<SeedRun>& runs) {
  int seeds_ok = 0;
  int horizon_ok = 0;
  std::string detail;
  for (std::size_t s = 0; s < runs.size(); ++s) {
    const auto& r = runs[s].report;
    int wins = 0;
    for (std::size_t k = 0; k < r.strike_rel.size(); ++k) wins += r.model_mae_bp[0][k] <= r.rw_mae_bp[0][k];
    seeds_ok += 2 * wins > static_cast<int>(r.strike_rel.size());
    const auto summary = error_summary(r);
    horizon_ok += summary.model_mean_bp.back() >= summary.model_mean_bp.front();
    detail += fmt("seed %zu: %d/40 strikes, model %.2f bp vs random walk %.2f bp; ", s + 1, wins,
                  summary.model_mean_bp[0], summary.rw_mean_bp[0]);
  }
  report(seeds_ok >= 4, "backtest sanity",
         fmt("model <= random walk at h=1 on a majority of strikes in %d of 5 seeds (need 4)", seeds_ok));
  info(detail);
  info(fmt("mean error at h=3 >= h=1 in %d of 5 seeds", horizon_ok));
}

// Under the reference drifts alpha decays until the +-10% legs price to zero
// and no day is tradeable, which would make the checks vacuous. The strategy
// is therefore replayed on the same models with the drift constants removed.
void strategy_invariants() {
  SyntheticSpec spec;
  spec.alpha_model.params.mu = 0.0;
  spec.rho_model.params.mu = 0.0;
  const auto data = generate_synthetic(spec, 1);
  const BacktestConfig cfg;
  StrategyConfig st{default_delta_grid()};
  st.delta_grid.push_back(std::numeric_limits<double>::infinity());
  const auto rep = simulate_strategy(data, cfg, rolling_forecasts(data, cfg), st);
  bool monotone = true;
  bool antisymmetric = true;
  std::size_t trades = 0;
  for (auto kind : {StructureKind::Strangle, StructureKind::RiskReversal}) {
    const auto& rows = rep.rows(kind);
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) monotone = monotone && rows[i].frequency <= rows[i - 1].frequency;
    for (const auto& row : rows)
      for (const auto& t : row.trades) {
        ++trades;
        const auto flipped = t.direction == Direction::Long ? Direction::Short : Direction::Long;
        antisymmetric = antisymmetric && trade_pnl(flipped, t.entry, t.exit) == -t.pnl &&
                        trade_pnl(t.direction, t.entry, t.exit) == t.pnl;
      }
  }
  const bool none_at_infinity = rep.strangle.back().n_trades == 0 && rep.risk_reversal.back().n_trades == 0 &&
                                rep.strangle.back().avg_return == 0.0 && rep.risk_reversal.back().avg_return == 0.0;
  const std::size_t tradeable = rep.n_days - rep.untradeable_days.size();
  report(monotone && antisymmetric && none_at_infinity && trades > 0, "strategy invariants",
         fmt("%zu of %zu days tradeable; frequency non-increasing over the 20-point grid: %s; P&L antisymmetric on %zu trades: %s; "
             "zero trades at infinite delta: %s (strangle frequency %.3f at 1e-6, %.3f at 1e-3)",
             tradeable, rep.n_days, monotone ? "yes" : "no", trades, antisymmetric ? "yes" : "no", none_at_infinity ? "yes" : "no",
             rep.strangle.front().frequency, rep.strangle[19].frequency));
}

void diagnostics_calibration(const std::vector<RecoveryOutcome>& recovered) {
  const char* names[] = {"alpha", "nu", "rho"};
  int level_accept[3] = {0, 0, 0};
  int diff_reject[3] = {0, 0, 0};
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto data = generate_synthetic(SyntheticSpec{}, 900 + seed);
    std::vector<double> lv[3];
    for (const auto& p : data.params) {
      const auto t = to_unconstrained(p);
      lv[0].push_back(t.a);
      lv[1].push_back(t.n);
      lv[2].push_back(t.r);
    }
    for (int s = 0; s < 3; ++s) {
      level_accept[s] += !adf_test(lv[s]).reject;
      diff_reject[s] += adf_test(difference(lv[s])).reject;
    }
  }
  bool adf_ok = true;
  std::string adf_detail;
  for (int s = 0; s < 3; ++s) {
    adf_ok = adf_ok && level_accept[s] > 10 && diff_reject[s] > 10;
    adf_detail += fmt("%s levels not rejected %d/20, differences rejected %d/20; ", names[s], level_accept[s],
                      diff_reject[s]);
  }

  bool arch_ok = true;
  std::string arch_detail;
  for (std::size_t m = 0; m < recovered.size(); ++m) {
    int raw_reject = 0;
    int std_accept = 0;
    const auto& out = recovered[m];
    for (std::size_t i = 0; i < out.fits.size(); ++i) {
      const auto& f = out.fits[i];
      const auto& x = out.series[i];
      double mean = 0.0;
      for (double v : x) mean += v;
      mean /= static_cast<double>(x.size());
      std::vector<double> centred(x.size());
      for (std::size_t t = 0; t < x.size(); ++t) centred[t] = x[t] - mean;
      raw_reject += arch_lm_test(centred, 5).reject;
      std::vector<double> z(f.residuals.size());
      for (std::size_t t = 0; t < z.size(); ++t) z[t] = f.residuals[t] / std::sqrt(f.cond_var[t]);
      std_accept += !arch_lm_test(z, 5).reject;
    }
    const int n = static_cast<int>(out.fits.size());
    arch_ok = arch_ok && 2 * raw_reject > n && 2 * std_accept > n;
    arch_detail += fmt("%s raw rejected %d/%d, standardized not rejected %d/%d; ", names[m], raw_reject, n,
                       std_accept, n);
  }
  report(adf_ok && arch_ok, "diagnostics calibration", "majority over 20 seeds per series");
  info("ADF: " + adf_detail);
  info("ARCH-LM(5): " + arch_detail);
}

void determinism(const std::string& cli) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "smilefx_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto config = dir / "config.json";
  write_file_atomic(config, nlohmann::json{{"synthetic", nlohmann::json::object()},
                                           {"seed", 17},
                                           {"backtest", {{"n_test", 60}}},
                                           {"format", "csv"}}
                                .dump(2));
  bool ok = true;
  std::string detail;
  for (const char* cmd : {"backtest", "trade"}) {
    std::string contents[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = dir / (std::string(cmd) + std::to_string(rep));
      const std::string line =
          "\"" + cli + "\" " + cmd + " --config \"" + config.string() + "\" --out \"" + out.string() + "\" 2>/dev/null";
      if (std::system(line.c_str()) != 0) {
        ok = false;
        detail += std::string(cmd) + " exited with an error; ";
        continue;
      }
      contents[rep] = read_file(out / (std::string(cmd) == "backtest" ? "backtest.csv" : "strategy.csv"));
    }
    const bool same = !contents[0].empty() && contents[0] == contents[1];
    ok = ok && same;
    detail += fmt("%s outputs %s (%zu bytes); ", cmd, same ? "identical" : "DIFFER", contents[0].size());
  }
  report(ok, "determinism", detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <smilefx-cli>\n");
    return 64;
  }
  const std::string cli = argv[1];
  const auto t0 = Clock::now();

  std::vector<SeedRun> runs;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) runs.push_back(run_seed(seed));
  std::vector<RecoveryOutcome> recovered;

  arbitrage_free(runs[0]);
  implied_vol_roundtrip();
  sabr_correctness();
  mle_recovery(recovered);
  forecast_oracle();
  backtest_sanity(runs);
  strategy_invariants();
  diagnostics_calibration(recovered);
  determinism(cli);

  std::printf("%d criteria failed; total %.1f s\n", failures, seconds_since(t0));
  return failures;
}
