#include <catch_amalgamated.hpp>

#include <cmath>

#include "smilefx/optimize.hpp"

using namespace smilefx::optim;
using Catch::Matchers::WithinAbs;

namespace {
double rosenbrock(const Vector& x) { return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2); }
}  // namespace

TEST_CASE("nelder_mead and bfgs find the Rosenbrock minimum") {
  const Vector x0{{-1.2, 1.0}};
  const auto nm = nelder_mead(rosenbrock, x0, {.max_iter = 5000, .f_tol = 1e-14, .initial_step = 0.1});
  CHECK_THAT(nm.x[0], WithinAbs(1.0, 1e-3));
  const auto bf = bfgs(rosenbrock, x0, {.max_iter = 5000, .f_tol = 1e-16, .g_tol = 1e-10});
  CHECK(bf.converged);
  CHECK_THAT(bf.x[0], WithinAbs(1.0, 1e-4));
  CHECK_THAT(bf.x[1], WithinAbs(1.0, 1e-4));
}

TEST_CASE("newton handles an indefinite start and a badly scaled valley") {
  const auto r = newton(rosenbrock, Vector{{-1.2, 1.0}}, {.max_iter = 200, .decrement_tol = 1e-14});
  CHECK(r.converged);
  CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-5));
  CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-5));

  // eigenvalues 1 and 1e8 along a rotated axis
  const auto valley = [](const Vector& x) {
    const double u = x[0] + x[1] - 2.0, v = x[0] - x[1];
    return 1e8 * u * u + v * v;
  };
  const auto q = newton(valley, Vector{{3.0, -1.0}});
  CHECK(q.converged);
  CHECK(q.iterations <= 5);
  CHECK_THAT(q.x[0], WithinAbs(1.0, 1e-6));
  CHECK_THAT(q.x[1], WithinAbs(1.0, 1e-6));
}

TEST_CASE("finite-difference derivatives of a quadratic") {
  const Objective f = [](const Vector& x) { return 3.0 * x[0] * x[0] + x[0] * x[1] + 2.0 * x[1] * x[1]; };
  const Vector x{{0.5, -1.0}};
  const Vector g = gradient(f, x);
  CHECK_THAT(g[0], WithinAbs(2.0, 1e-8));
  CHECK_THAT(g[1], WithinAbs(-3.5, 1e-8));
  const Matrix h = hessian(f, x);
  CHECK_THAT(h(0, 0), WithinAbs(6.0, 1e-5));
  CHECK_THAT(h(0, 1), WithinAbs(1.0, 1e-5));
  CHECK_THAT(h(1, 0), WithinAbs(1.0, 1e-5));
  CHECK_THAT(h(1, 1), WithinAbs(4.0, 1e-5));
}

TEST_CASE("levenberg_marquardt fits an exponential and honours bounds") {
  const ResidualFn r = [](const Vector& x) {
    Vector out(6);
    for (int i = 0; i < 6; ++i) out[i] = x[0] * std::exp(x[1] * i * 0.2) - 2.0 * std::exp(-0.7 * i * 0.2);
    return out;
  };
  const auto fit = levenberg_marquardt(r, Vector{{1.0, 0.0}});
  CHECK(fit.converged);
  CHECK_THAT(fit.x[0], WithinAbs(2.0, 1e-8));
  CHECK_THAT(fit.x[1], WithinAbs(-0.7, 1e-8));

  LevenbergMarquardtOptions boxed;
  boxed.lower = Vector{{0.0, -0.5}};
  boxed.upper = Vector{{10.0, 0.0}};
  const auto clipped = levenberg_marquardt(r, Vector{{1.0, 0.0}}, boxed);
  CHECK(clipped.x[1] >= -0.5);
  CHECK_THAT(clipped.x[1], WithinAbs(-0.5, 1e-9));
}
