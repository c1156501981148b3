#include "iontrap/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace iontrap {

namespace {

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Standard two-loop recursion; H0 = gamma * I from the most recent pair.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& g, const std::deque<Pair>& pairs) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(pairs.size());
  for (int i = static_cast<int>(pairs.size()) - 1; i >= 0; --i) {
    alpha[i] = pairs[i].rho * pairs[i].s.dot(q);
    q -= alpha[i] * pairs[i].y;
  }
  const Pair& last = pairs.back();
  const double gamma = last.s.dot(last.y) / last.y.squaredNorm();
  q *= gamma;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double beta = pairs[i].rho * pairs[i].y.dot(q);
    q += (alpha[i] - beta) * pairs[i].s;
  }
  return -q;
}

}  // namespace

MinimizeResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0,
                              const MinimizeOptions& options) {
  if (options.gradient_tolerance <= 0.0) {
    throw std::invalid_argument("minimize_lbfgs: gradient_tolerance must be positive");
  }
  const Eigen::Index n = x0.size();
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd g(n), g_new(n), x_new(n);
  double fx = f(x, g);
  if (!std::isfinite(fx)) {
    throw std::invalid_argument("minimize_lbfgs: objective not finite at the start point");
  }

  std::deque<Pair> pairs;
  const std::size_t memory = static_cast<std::size_t>(std::max(1, options.history));

  int iter = 0;
  bool converged = g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance;
  while (!converged && iter < options.max_iterations) {
    Eigen::VectorXd d = pairs.empty() ? Eigen::VectorXd(-options.initial_hessian_scale * g)
                                      : lbfgs_direction(g, pairs);
    double dg = g.dot(d);
    if (!(dg < 0.0)) {
      // Curvature information went stale; restart from scaled steepest descent.
      pairs.clear();
      d = -options.initial_hessian_scale * g;
      dg = g.dot(d);
    }

    const double f_old = fx;
    const double gmax_old = g.lpNorm<Eigen::Infinity>();
    double step = 1.0;
    bool accepted = false;
    double fx_new = fx;
    for (int ls = 0; ls < 64; ++ls) {
      x_new = x + step * d;
      fx_new = f(x_new, g_new);
      if (std::isfinite(fx_new)) {
        if (fx_new <= f_old + 1e-4 * step * dg) {
          accepted = true;  // Armijo
          break;
        }
        // Near the minimum the decrease falls below double resolution; accept
        // any step that still shrinks the gradient.
        if (std::abs(fx_new - f_old) <= 1e-12 * (std::abs(fx_new) + std::abs(f_old)) &&
            g_new.lpNorm<Eigen::Infinity>() < gmax_old) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) break;  // line search stagnated at machine precision

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-10 * s.norm() * y.norm()) {
      pairs.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (pairs.size() > memory) pairs.pop_front();
    }
    x.swap(x_new);
    g.swap(g_new);
    fx = fx_new;
    ++iter;
    converged = g.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance;
  }

  MinimizeResult result;
  result.x = std::move(x);
  result.value = fx;
  result.gradient_max_norm = g.lpNorm<Eigen::Infinity>();
  result.iterations = iter;
  result.converged = converged;
  return result;
}

}  // namespace iontrap
