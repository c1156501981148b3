#include "iontrap/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "iontrap/errors.hpp"
#include "iontrap/minimize.hpp"
#include "iontrap/random.hpp"

namespace iontrap {

namespace {

// Energy and gradient in one pass. Returns false when a pair is closer than
// kMinIonSeparation; energy/gradient are then unusable.
bool energy_and_gradient(const PositionMatrix& positions, double spring, double kq2,
                         double& energy, PositionMatrix& gradient) {
  const Eigen::Index n = positions.rows();
  energy = 0.0;
  gradient.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    energy += 0.5 * spring * positions.row(i).squaredNorm();
    gradient.row(i) = spring * positions.row(i);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dx = positions(i, 0) - positions(j, 0);
      const double dy = positions(i, 1) - positions(j, 1);
      const double d2 = dx * dx + dy * dy;
      const double d = std::sqrt(d2);
      if (d < kMinIonSeparation) return false;
      energy += kq2 / d;
      const double f = kq2 / (d2 * d);
      gradient(i, 0) -= f * dx;
      gradient(i, 1) -= f * dy;
      gradient(j, 0) += f * dx;
      gradient(j, 1) += f * dy;
    }
  }
  return true;
}

}  // namespace

PositionMatrix seed_lattice(int n, const TrapSpec& spec, const LatticeSeedOptions& options,
                            const PhysicalConstants& constants) {
  if (n < 1) throw std::invalid_argument("seed_lattice: n must be >= 1");
  const double a = characteristic_lengths(spec, constants).planar;

  struct Site {
    double r2;
    double angle;
    int i;
    int j;
    double x;
    double y;
  };
  const int k = static_cast<int>(std::ceil(1.1 * std::sqrt(static_cast<double>(n)))) + 6;
  std::vector<Site> sites;
  sites.reserve(static_cast<std::size_t>(2 * k + 1) * (2 * k + 1));
  const double row_height = std::sqrt(3.0) / 2.0;
  for (int i = -k; i <= k; ++i) {
    for (int j = -k; j <= k; ++j) {
      const double x = a * (i + 0.5 * j);
      const double y = a * (row_height * j);
      sites.push_back({x * x + y * y, std::atan2(y, x), i, j, x, y});
    }
  }
  std::sort(sites.begin(), sites.end(), [](const Site& lhs, const Site& rhs) {
    if (lhs.r2 != rhs.r2) return lhs.r2 < rhs.r2;
    if (lhs.angle != rhs.angle) return lhs.angle < rhs.angle;
    if (lhs.i != rhs.i) return lhs.i < rhs.i;
    return lhs.j < rhs.j;
  });

  PositionMatrix positions(n, 2);
  SplitMix64 rng(options.seed);
  for (int s = 0; s < n; ++s) {
    const double jx = (2.0 * rng.uniform() - 1.0) * options.jitter_rel * a;
    const double jy = (2.0 * rng.uniform() - 1.0) * options.jitter_rel * a;
    positions(s, 0) = sites[static_cast<std::size_t>(s)].x + jx;
    positions(s, 1) = sites[static_cast<std::size_t>(s)].y + jy;
  }
  return positions;
}

double potential_energy(const PositionMatrix& positions, const TrapSpec& spec,
                        const PhysicalConstants& constants) {
  const double beta = rotating_frame_beta(spec);
  const double spring = spec.ion_mass * spec.omega_z * spec.omega_z * beta;
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  double energy = 0.0;
  PositionMatrix gradient;
  if (!energy_and_gradient(positions, spring, kq2, energy, gradient)) {
    throw CoincidentIonsError("potential_energy: two ions closer than 1e-12 m");
  }
  return energy;
}

PositionMatrix potential_gradient(const PositionMatrix& positions, const TrapSpec& spec,
                                  const PhysicalConstants& constants) {
  const double beta = rotating_frame_beta(spec);
  const double spring = spec.ion_mass * spec.omega_z * spec.omega_z * beta;
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  double energy = 0.0;
  PositionMatrix gradient;
  if (!energy_and_gradient(positions, spring, kq2, energy, gradient)) {
    throw CoincidentIonsError("potential_gradient: two ions closer than 1e-12 m");
  }
  return gradient;
}

double default_gradient_tolerance(const TrapSpec& spec, const PhysicalConstants& constants) {
  const double beta = rotating_frame_beta(spec);
  const double planar = characteristic_lengths(spec, constants).planar;
  return 1e-6 * spec.ion_mass * spec.omega_z * spec.omega_z * beta * planar;
}

Crystal find_equilibrium(const PositionMatrix& seed, const TrapSpec& spec,
                         const EquilibrationOptions& options,
                         const PhysicalConstants& constants) {
  const Eigen::Index n = seed.rows();
  if (n < 1) throw std::invalid_argument("find_equilibrium: need at least one ion");
  const double beta = rotating_frame_beta(spec);
  const double spring = spec.ion_mass * spec.omega_z * spec.omega_z * beta;
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  const double tolerance =
      options.tolerance ? *options.tolerance : default_gradient_tolerance(spec, constants);
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("find_equilibrium: tolerance must be positive");
  }

  // Surfaces CoincidentIonsError for an invalid seed before minimizing.
  potential_energy(seed, spec, constants);

  const auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) -> double {
    const Eigen::Map<const PositionMatrix> p(x.data(), n, 2);
    double energy = 0.0;
    PositionMatrix g;
    if (!energy_and_gradient(p, spring, kq2, energy, g)) {
      return std::numeric_limits<double>::infinity();
    }
    grad = Eigen::Map<const Eigen::VectorXd>(g.data(), 2 * n);
    return energy;
  };

  MinimizeOptions mopts;
  mopts.gradient_tolerance = tolerance;
  mopts.max_iterations = options.max_iterations;
  mopts.initial_hessian_scale = 1.0 / spring;  // maps force (N) to displacement (m)
  const Eigen::Map<const Eigen::VectorXd> x0(seed.data(), 2 * n);
  MinimizeResult result = minimize_lbfgs(objective, x0, mopts);
  if (!result.converged) {
    std::ostringstream msg;
    msg << "find_equilibrium: gradient max-norm " << result.gradient_max_norm
        << " N above tolerance " << tolerance << " N after " << result.iterations
        << " iterations";
    throw NonConvergenceError(msg.str());
  }

  Crystal crystal;
  crystal.positions = Eigen::Map<const PositionMatrix>(result.x.data(), n, 2);
  crystal.trap = spec;
  crystal.energy = result.value;
  crystal.gradient_norm = result.gradient_max_norm;
  crystal.iterations = result.iterations;

  if (n >= 2) {
    const SpacingStats stats = nn_spacing_stats(crystal);
    if (stats.min < 1e-9) {
      throw CoincidentIonsError("find_equilibrium: converged with ions closer than 1e-9 m");
    }
  }
  return crystal;
}

SpacingStats nn_spacing_stats(const Crystal& crystal) {
  const Eigen::Index n = crystal.positions.rows();
  if (n < 2) throw std::invalid_argument("nn_spacing_stats: need at least two ions");
  std::vector<double> nearest(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
      nearest[static_cast<std::size_t>(i)] = std::min(nearest[static_cast<std::size_t>(i)], d);
      nearest[static_cast<std::size_t>(j)] = std::min(nearest[static_cast<std::size_t>(j)], d);
    }
  }
  std::sort(nearest.begin(), nearest.end());
  const std::size_t count = nearest.size();
  const double median = (count % 2 == 1)
                            ? nearest[count / 2]
                            : 0.5 * (nearest[count / 2 - 1] + nearest[count / 2]);
  return {nearest.front(), median, nearest.back()};
}

}  // namespace iontrap
