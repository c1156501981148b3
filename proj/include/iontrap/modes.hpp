#pragma once

#include <Eigen/Core>

#include "iontrap/constants.hpp"
#include "iontrap/crystal.hpp"

namespace iontrap {

/// Transverse (drumhead) normal modes of a planar crystal.
///
/// The dispersion is anomalous: the center-of-mass mode sits at the top of
/// the band at exactly omega_z, because the stiffness matrix is
/// m omega_z^2 I minus a positive-semidefinite weighted graph Laplacian.
struct ModeSpectrum {
  Eigen::VectorXd frequencies;   ///< omega_m, rad/s, sorted descending
  Eigen::MatrixXd eigenvectors;  ///< orthonormal, column m = b_m
  int com_index = 0;             ///< center-of-mass mode (uniform eigenvector)
};

/// Axial stiffness matrix about the equilibrium, N/m:
/// K_ii = m omega_z^2 - sum_k kq^2/d_ik^3, K_ij = +kq^2/d_ij^3.
Eigen::MatrixXd stiffness_matrix(const Crystal& crystal,
                                 const PhysicalConstants& constants = {});

/// Solves K b = m omega^2 b. Eigenvector signs are fixed so the first
/// non-negligible component is positive; the COM mode is identified as the
/// eigenvector with the smallest component variance, which stays correct
/// under tiny numerical splitting of nearly degenerate pairs.
/// Throws UnstablePlanarCrystalError when any eigenvalue is <= 0.
ModeSpectrum mode_spectrum(const Crystal& crystal, const PhysicalConstants& constants = {});

struct StabilityReport {
  bool stable;
  double min_omega_sq;  ///< smallest K eigenvalue over m, rad^2/s^2 (negative if unstable)
  double margin;        ///< m omega_z^2 - lambda_max(Laplacian), N/m
};

/// Reports how far the crystal sits from the single-plane instability.
/// Never throws; an unstable crystal is flagged, not rejected.
StabilityReport check_planar_stability(const Crystal& crystal,
                                       const PhysicalConstants& constants = {});

/// Same report computed from an already-diagonalized (hence stable) spectrum.
StabilityReport check_planar_stability(const ModeSpectrum& spectrum, double ion_mass);

}  // namespace iontrap
