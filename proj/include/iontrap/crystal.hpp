#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "iontrap/constants.hpp"
#include "iontrap/trap.hpp"

namespace iontrap {

/// In-plane ion coordinates, row per ion, columns (x, y), meters.
using PositionMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Pairs closer than this are treated as singular by the potential.
inline constexpr double kMinIonSeparation = 1e-12;  // m

/// Converged planar equilibrium in the rotating frame (crystal plane z = 0).
struct Crystal {
  PositionMatrix positions;
  TrapSpec trap;
  double energy = 0.0;         ///< J
  double gradient_norm = 0.0;  ///< max |force component| at convergence, N
  int iterations = 0;
};

struct LatticeSeedOptions {
  double jitter_rel = 1e-3;  ///< jitter amplitude in units of the planar length
  std::uint64_t seed = 12345;
};

/// n sites of a triangular lattice with spacing l_p, filled outward from the
/// origin, plus deterministic jitter that breaks the orientation degeneracy.
PositionMatrix seed_lattice(int n, const TrapSpec& spec,
                            const LatticeSeedOptions& options = {},
                            const PhysicalConstants& constants = {});

/// Rotating-frame in-plane energy: sum of the harmonic term
/// (1/2) m omega_z^2 beta rho_i^2 and all pairwise Coulomb energies.
/// Throws CoincidentIonsError when two ions are closer than kMinIonSeparation.
double potential_energy(const PositionMatrix& positions, const TrapSpec& spec,
                        const PhysicalConstants& constants = {});

/// Exact analytic gradient of potential_energy, N x 2, newtons.
PositionMatrix potential_gradient(const PositionMatrix& positions, const TrapSpec& spec,
                                  const PhysicalConstants& constants = {});

/// Default convergence tolerance: 1e-6 of the natural force scale
/// m omega_z^2 beta l_p.
double default_gradient_tolerance(const TrapSpec& spec,
                                  const PhysicalConstants& constants = {});

struct EquilibrationOptions {
  std::optional<double> tolerance;  ///< max |gradient component| in newtons
  int max_iterations = 20000;
};

/// Local minimum of the in-plane potential from the given seed. Deterministic:
/// (seed, spec, tolerance) fix the result exactly.
/// Throws NonConvergenceError when the iteration budget runs out.
Crystal find_equilibrium(const PositionMatrix& seed, const TrapSpec& spec,
                         const EquilibrationOptions& options = {},
                         const PhysicalConstants& constants = {});

struct SpacingStats {
  double min;
  double median;
  double max;
};

/// Summary of per-ion nearest-neighbor distances. Requires N >= 2.
SpacingStats nn_spacing_stats(const Crystal& crystal);

}  // namespace iontrap
