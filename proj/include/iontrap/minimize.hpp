#pragma once

#include <functional>

#include <Eigen/Core>

namespace iontrap {

struct MinimizeOptions {
  double gradient_tolerance = 1e-8;  ///< convergence on max |gradient component|
  int max_iterations = 20000;
  int history = 12;  ///< L-BFGS memory length
  /// Scale of the first (steepest-descent) step: d0 = -initial_hessian_scale * g.
  /// Set to the inverse of the typical curvature so the first trial step has
  /// the natural length scale of the problem; later steps are self-scaled.
  double initial_hessian_scale = 1.0;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gradient_max_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Objective callback: returns f(x) and fills grad. May return +infinity for
/// infeasible trial points; the line search then backs off.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

/// Limited-memory BFGS with a backtracking Armijo line search. Deterministic:
/// identical inputs produce bitwise-identical iterates.
MinimizeResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0,
                              const MinimizeOptions& options = {});

}  // namespace iontrap
