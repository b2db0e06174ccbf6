#pragma once

#include <functional>

#include <Eigen/Core>

namespace sensakit {

/// Objective returning f(x) and writing its gradient. Returning +inf marks
/// an infeasible point (the line search backs off).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& gradient)>;

struct MinimizeOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double value_tolerance = 1e-10;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Box-constrained quasi-Newton minimisation (BFGS on the free variables,
/// projection onto the box, Armijo backtracking). Every accepted step
/// decreases f, so the returned value never exceeds f(clamp(x0)).
MinimizeResult minimize_box(const Objective& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                            const Eigen::VectorXd& upper, const MinimizeOptions& options = {});

}  // namespace sensakit
