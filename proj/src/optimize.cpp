#include "sensakit/optimize.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "sensakit/error.hpp"

namespace sensakit {
namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  return x.cwiseMax(lo).cwiseMin(hi);
}

// Components sitting on a bound with the gradient pointing outward.
Eigen::Array<bool, Eigen::Dynamic, 1> active_set(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                                  const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::Array<bool, Eigen::Dynamic, 1> active(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    active[i] = (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0);
  }
  return active;
}

}  // namespace

MinimizeResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const MinimizeOptions& options) {
  const Eigen::Index n = x0.size();
  if (lower.size() != n || upper.size() != n) throw Error(ErrorCode::dimension_mismatch, "minimize_box: bound sizes");
  MinimizeResult res;
  Eigen::VectorXd x = clamp(x0, lower, upper);
  Eigen::VectorXd g(n);
  double fx = f(x, g);
  ++res.evaluations;
  if (!std::isfinite(fx)) {
    res.x = x;
    res.value = fx;
    return res;
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd g_new(n);

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    const auto active = active_set(x, g, lower, upper);
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i]) pg[i] = 0.0;
    }
    if (pg.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      res.converged = true;
      break;
    }
    Eigen::VectorXd p = -(H * pg);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (active[i]) p[i] = 0.0;
    }
    if (g.dot(p) >= 0.0) {
      H.setIdentity();
      p = -pg;
    }

    bool accepted = false;
    double step = 1.0;
    Eigen::VectorXd x_new;
    double f_new = 0.0;
    for (int halving = 0; halving < 40; ++halving, step *= 0.5) {
      x_new = clamp(x + step * p, lower, upper);
      f_new = f(x_new, g_new);
      ++res.evaluations;
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (!H.isIdentity()) {
        H.setIdentity();
        continue;
      }
      break;
    }

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    const double change = fx - f_new;
    x = x_new;
    g = g_new;
    const double f_old = fx;
    fx = f_new;
    if (sy > 1e-10 * s.norm() * yv.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) + rho * s * s.transpose();
    }
    if (change <= options.value_tolerance * (1.0 + std::abs(f_old))) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  res.x = x;
  res.value = fx;
  return res;
}

}  // namespace sensakit
