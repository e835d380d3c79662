#pragma once

// Small dense optimisers shared by the calibrator and the time-series MLE:
// Nelder-Mead, BFGS on finite-difference gradients, Levenberg-Marquardt on
// finite-difference Jacobians, and a central-difference Hessian.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace smilefx::optim {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Objective = std::function<double(const Vector&)>;
using ResidualFn = std::function<Vector(const Vector&)>;

struct MinimizeResult {
  Vector x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

namespace detail {

inline double safe(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

inline double fd_step(double x, double rel) { return rel * std::max(1.0, std::abs(x)); }

}  // namespace detail

struct NelderMeadOptions {
  int max_iter = 2000;
  double f_tol = 1e-8;       // absolute spread of simplex values
  double initial_step = 0.1;
};

inline MinimizeResult nelder_mead(const Objective& f, const Vector& x0, const NelderMeadOptions& opts = {}) {
  const auto n = x0.size();
  MinimizeResult result;
  auto eval = [&](const Vector& x) {
    ++result.evaluations;
    return detail::safe(f(x));
  };

  std::vector<Vector> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) simplex[i + 1][i] += detail::fd_step(x0[i], opts.initial_step);
  for (Eigen::Index i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    result.iterations = iter + 1;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    const auto best = order.front();
    const auto worst = order.back();
    const auto second = order[n - 1];
    if (std::isfinite(values[worst]) && values[worst] - values[best] <= opts.f_tol) {
      result.converged = true;
      break;
    }

    Vector centroid = Vector::Zero(n);
    for (auto idx : order)
      if (idx != worst) centroid += simplex[idx];
    centroid /= static_cast<double>(n);

    const Vector reflected = centroid + (centroid - simplex[worst]);
    const double f_reflected = eval(reflected);
    if (f_reflected < values[best]) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Vector contracted =
        outside ? Vector(centroid + 0.5 * (reflected - centroid)) : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (auto idx : order) {
      if (idx == best) continue;
      simplex[idx] = simplex[best] + 0.5 * (simplex[idx] - simplex[best]);
      values[idx] = eval(simplex[idx]);
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.value = values[best];
  return result;
}

inline Vector gradient(const Objective& f, const Vector& x, double rel_step = 1e-5) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = detail::fd_step(x[i], rel_step);
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline Matrix hessian(const Objective& f, const Vector& x, double rel_step = 1e-4) {
  const auto n = x.size();
  Matrix h(n, n);
  Vector step(n);
  for (Eigen::Index i = 0; i < n; ++i) step[i] = detail::fd_step(x[i], rel_step);
  const double f0 = f(x);
  Vector probe = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    probe[i] = x[i] + step[i];
    const double up = f(probe);
    probe[i] = x[i] - step[i];
    const double down = f(probe);
    probe[i] = x[i];
    h(i, i) = (up - 2.0 * f0 + down) / (step[i] * step[i]);
    for (Eigen::Index j = 0; j < i; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          probe[i] = x[i] + si * step[i];
          probe[j] = x[j] + sj * step[j];
          acc += si * sj * f(probe);
        }
      }
      probe[i] = x[i];
      probe[j] = x[j];
      h(i, j) = h(j, i) = acc / (4.0 * step[i] * step[j]);
    }
  }
  return h;
}

struct BfgsOptions {
  int max_iter = 2000;
  double f_tol = 1e-8;  // stop once an accepted step improves f by less than this
  double g_tol = 1e-8;
};

inline MinimizeResult bfgs(const Objective& f, const Vector& x0, const BfgsOptions& opts = {}) {
  const auto n = x0.size();
  MinimizeResult result;
  auto eval = [&](const Vector& x) {
    ++result.evaluations;
    return detail::safe(f(x));
  };
  auto grad = [&](const Vector& x) {
    result.evaluations += static_cast<int>(2 * n);
    return gradient([&](const Vector& p) { return detail::safe(f(p)); }, x);
  };

  Vector x = x0;
  double fx = eval(x);
  result.x = x;
  result.value = fx;
  if (!std::isfinite(fx)) return result;
  Vector g = grad(x);
  Matrix inv_h = Matrix::Identity(n, n);
  bool fresh = true;

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    result.iterations = iter + 1;
    if (!g.allFinite()) break;
    if (g.lpNorm<Eigen::Infinity>() <= opts.g_tol) {
      result.converged = true;
      break;
    }
    Vector dir = -inv_h * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      inv_h.setIdentity();
      dir = -g;
      slope = -g.squaredNorm();
      fresh = true;
    }

    double t = 1.0;
    Vector x_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = x + t * dir;
      f_new = eval(x_new);
      if (f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      if (fresh) {
        // Steepest descent cannot improve either: gradient noise floor.
        result.converged = true;
        break;
      }
      inv_h.setIdentity();
      fresh = true;
      continue;
    }

    const double improvement = fx - f_new;
    const Vector g_new = grad(x_new);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    x = x_new;
    fx = f_new;
    g = g_new;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) inv_h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(n, n);
      inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
      fresh = false;
    }
    if (improvement < opts.f_tol) {
      result.converged = true;
      break;
    }
  }
  result.x = x;
  result.value = fx;
  return result;
}

struct NewtonOptions {
  int max_iter = 30;
  double decrement_tol = 1e-6;  // stop once g' H^-1 g / 2 falls below this
};

// Damped Newton on finite-difference derivatives. Slow for large problems but
// robust on long, badly conditioned valleys where BFGS creeps. An indefinite
// Hessian is shifted towards the identity until it factorises.
inline MinimizeResult newton(const Objective& f, const Vector& x0, const NewtonOptions& opts = {}) {
  const auto n = x0.size();
  const Objective g_f = [&](const Vector& p) { return detail::safe(f(p)); };
  MinimizeResult result;
  result.x = x0;
  result.value = g_f(x0);
  if (!std::isfinite(result.value)) return result;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    result.iterations = iter + 1;
    const Vector g = gradient(g_f, result.x);
    const Matrix h = hessian(g_f, result.x);
    result.evaluations += static_cast<int>(2 * n + 1 + 2 * n * n);
    if (!g.allFinite() || !h.allFinite()) break;

    Vector step;
    double shift = 0.0;
    const double diag = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    for (int k = 0; k < 40 && step.size() == 0; ++k) {
      Eigen::LLT<Matrix> llt(h + shift * Matrix::Identity(n, n));
      if (llt.info() == Eigen::Success) step = -llt.solve(g);
      else shift = shift == 0.0 ? 1e-10 * diag : 10.0 * shift;
    }
    if (step.size() == 0 || !step.allFinite()) break;
    const double decrement = -g.dot(step);
    if (shift == 0.0 && 0.5 * decrement < opts.decrement_tol) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    for (double t = 1.0; t > 1e-12; t *= 0.5) {
      const Vector trial = result.x + t * step;
      const double value = g_f(trial);
      ++result.evaluations;
      if (value <= result.value - 1e-4 * t * decrement) {
        result.x = trial;
        result.value = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return result;
}

struct LevenbergMarquardtOptions {
  int max_iter = 500;
  double f_tol = 1e-14;  // relative decrease of the sum of squares
  double x_tol = 1e-13;
  std::optional<Vector> lower;
  std::optional<Vector> upper;
};

inline Matrix jacobian(const ResidualFn& r, const Vector& x, double rel_step = 1e-6) {
  Vector probe = x;
  Matrix jac;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = detail::fd_step(x[i], rel_step);
    probe[i] = x[i] + h;
    const Vector up = r(probe);
    probe[i] = x[i] - h;
    const Vector down = r(probe);
    probe[i] = x[i];
    if (i == 0) jac.resize(up.size(), x.size());
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

// Minimises ||r(x)||^2 inside an optional box.
inline MinimizeResult levenberg_marquardt(const ResidualFn& residuals, const Vector& x0,
                                          const LevenbergMarquardtOptions& opts = {}) {
  auto project = [&](Vector x) {
    if (opts.lower) x = x.cwiseMax(*opts.lower);
    if (opts.upper) x = x.cwiseMin(*opts.upper);
    return x;
  };
  MinimizeResult result;
  Vector x = project(x0);
  Vector r = residuals(x);
  ++result.evaluations;
  double fx = r.allFinite() ? r.squaredNorm() : std::numeric_limits<double>::infinity();
  result.x = x;
  result.value = fx;
  if (!std::isfinite(fx)) return result;
  if (fx <= 1e-30) {
    result.converged = true;
    return result;
  }

  double lambda = 1e-3;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    result.iterations = iter + 1;
    const Matrix jac = jacobian(residuals, x);
    result.evaluations += static_cast<int>(2 * x.size());
    const Matrix jtj = jac.transpose() * jac;
    const Vector jtr = jac.transpose() * r;

    bool accepted = false;
    while (lambda < 1e16) {
      Matrix damped = jtj;
      for (Eigen::Index i = 0; i < damped.rows(); ++i) damped(i, i) += lambda * std::max(jtj(i, i), 1e-12);
      const Vector delta = damped.ldlt().solve(-jtr);
      const Vector x_new = project(x + delta);
      const Vector r_new = residuals(x_new);
      ++result.evaluations;
      const double f_new = r_new.allFinite() ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
      if (f_new < fx) {
        const double decrease = fx - f_new;
        const double step = (x_new - x).lpNorm<Eigen::Infinity>();
        const double prev = fx;
        x = x_new;
        r = r_new;
        fx = f_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (fx <= 1e-30 || decrease <= opts.f_tol * prev ||
            step <= opts.x_tol * (1.0 + x.lpNorm<Eigen::Infinity>())) {
          result.converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No damping level improves the fit: x is stationary to working precision.
      result.converged = true;
    }
    if (result.converged) break;
  }
  result.x = x;
  result.value = fx;
  return result;
}

}  // namespace smilefx::optim
