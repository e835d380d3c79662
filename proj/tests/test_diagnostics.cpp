#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "smilefx/arma_garch.hpp"
#include "smilefx/data_io.hpp"
#include "smilefx/diagnostics.hpp"
#include "smilefx/regression.hpp"
#include "smilefx/transform.hpp"

using namespace smilefx;
using Catch::Matchers::WithinAbs;

namespace {
std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  auto e = gaussian(n, seed);
  std::vector<double> x(n);
  x[0] = e[0];
  for (std::size_t t = 1; t < n; ++t) x[t] = phi * x[t - 1] + e[t];
  return x;
}

std::vector<double> random_walk(std::size_t n, std::uint64_t seed) { return ar1(1.0, n, seed); }
}  // namespace

TEST_CASE("ols") {
  Eigen::MatrixXd X(5, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3, 1, 4;
  Eigen::VectorXd y(5);
  y << 1, 3, 5, 7, 9.5;
  const auto fit = ols(X, y);
  CHECK_THAT(fit.coef[1], WithinAbs(2.1, 1e-12));
  Eigen::MatrixXd collinear(5, 2);
  collinear << 1, 2, 1, 2, 1, 2, 1, 2, 1, 2;
  CHECK_THROWS_AS(ols(collinear, y), Error);
}

TEST_CASE("acf") {
  SECTION("constant series has no variance") {
    const std::vector<double> levels{1, 2, 3, 4, 5, 6, 7, 8};
    CHECK_THROWS_AS(acf(difference(levels), 2), Error);
  }
  SECTION("white noise stays inside the band") {
    const auto x = gaussian(10000, 1);
    const auto r = acf(x, 20);
    CHECK(r[0] == 1.0);
    int inside = 0;
    for (std::size_t k = 1; k <= 20; ++k) inside += std::abs(r[k]) < 3.0 / std::sqrt(10000.0);
    CHECK(inside >= 19);
  }
  SECTION("AR(1)") {
    const auto r = acf(ar1(0.8, 50000, 2), 5);
    CHECK_THAT(r[1], WithinAbs(0.8, 0.02));
  }
  CHECK_THROWS_AS(acf(gaussian(10, 1), 5), Error);
}

TEST_CASE("pacf") {
  const auto x = ar1(0.8, 50000, 3);
  const auto p = pacf(x, 10);
  const auto r = acf(x, 10);
  CHECK(p[1] == r[1]);
  CHECK_THAT(p[1], WithinAbs(0.8, 0.02));
  for (std::size_t k = 2; k <= 10; ++k) CHECK(std::abs(p[k]) < 0.03);

  const auto w = pacf(gaussian(10000, 4), 20);
  int inside = 0;
  for (std::size_t k = 1; k <= 20; ++k) inside += std::abs(w[k]) < 3.0 / std::sqrt(10000.0);
  CHECK(inside >= 19);
}

TEST_CASE("adf size and power") {
  int rw_accept = 0;
  int ar_reject = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    rw_accept += !adf_test(random_walk(2000, 100 + s)).reject;
    ar_reject += adf_test(ar1(0.2, 2000, 300 + s)).reject;
  }
  CHECK(rw_accept >= 95);
  CHECK(ar_reject >= 95);
  const auto r = adf_test(random_walk(500, 1));
  CHECK(r.critical_values.at("5%") == -2.86);
  CHECK(default_adf_lags(1001) == 10);
}

TEST_CASE("adf on the synthetic parameter series") {
  SyntheticSpec spec;
  const auto data = generate_synthetic(spec, 5);
  std::vector<double> a;
  for (const auto& p : data.params) a.push_back(to_unconstrained(p).a);
  CHECK_FALSE(adf_test(a).reject);
  CHECK(adf_test(difference(a)).reject);
}

TEST_CASE("arch-lm") {
  int quiet = 0;
  for (std::uint64_t s = 0; s < 50; ++s) quiet += !arch_lm_test(gaussian(2000, 500 + s), 5).reject;
  CHECK(quiet >= 45);

  const ArmaGarchSpec spec{0, 0, false};
  const ArmaGarchParams prm{0.0, {}, {}, 0.1, 0.2, 0.7, 200.0};
  const auto x = simulate(spec, prm, 5000, 9);
  CHECK(arch_lm_test(x, 5).reject);

  const auto f = fit(spec, x);
  std::vector<double> z(f.residuals.size());
  for (std::size_t t = 0; t < z.size(); ++t) z[t] = f.residuals[t] / std::sqrt(f.cond_var[t]);
  CHECK_FALSE(arch_lm_test(z, 5).reject);
  CHECK_THROWS_AS(arch_lm_test(x, 0), Error);
}

TEST_CASE("information criteria") {
  const auto zero = information_criteria(0.0, 0, 10.0);
  CHECK(zero.aic == 0.0);
  CHECK(zero.bic == 0.0);
  const auto ic = information_criteria(-100.0, 3, std::exp(2.0));
  CHECK_THAT(ic.aic, WithinAbs(206.0, 1e-12));
  CHECK_THAT(ic.bic, WithinAbs(206.0, 1e-12));
  const auto more = information_criteria(-100.0, 4, 500.0);
  const auto less = information_criteria(-100.0, 3, 500.0);
  CHECK_THAT(more.aic - less.aic, WithinAbs(2.0, 1e-12));
  CHECK_THAT(more.bic - less.bic, WithinAbs(std::log(500.0), 1e-12));
}
