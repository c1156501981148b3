#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "iontrap/couplings.hpp"

namespace iontrap {

/// Effective mean-field precession rate on each spin,
/// B_j = (2/N) sum_{i != j} J_ij <sigma_i^z>, rad/s. Under the Ising
/// Hamiltonian H = (1/N) sum_{i<j} J_ij sigma_i^z sigma_j^z the transverse
/// Bloch component of spin j rotates about z at exactly this rate at t = 0
/// for product states (d<sx_j>/dt = -B_j <sy_j>, d<sy_j>/dt = +B_j <sx_j>).
Eigen::VectorXd mean_field_field(const CouplingMatrix& cm,
                                 const Eigen::VectorXd& z_expectations);

/// Exact single-spin coherence decay for an equatorial preparation
/// (theta = pi/2, spins along +x):  <sx_j(t)> = prod_{k != j} cos(2 J_jk t / N).
/// Returns a times x spins matrix.
/// Throws UnsupportedPreparationError for theta != pi/2.
Eigen::MatrixXd analytic_depolarization(const CouplingMatrix& cm,
                                        std::span<const double> times,
                                        double theta);

struct EvolveOptions {
  int max_spins = 14;
  int krylov_dimension = 40;
  double max_phase_per_step = 5.0;      ///< |H| dt per Lanczos substep
  double norm_drift_tolerance = 1e-9;
};

struct EvolveResult {
  std::vector<double> times;
  Eigen::MatrixXd sx, sy, sz;  ///< times x spins
  Eigen::VectorXd sx_mean, sy_mean, sz_mean;
  double max_norm_drift = 0.0;  ///< worst | ||psi|| - 1 | seen
};

/// Dense statevector evolution under
///   H = (1/N) sum_{i<j} J_ij sigma_i^z sigma_j^z + (b/2) sum_j sigma_j^x
/// from the product state with every spin rotated by theta from +z. b is the
/// full Rabi angular frequency between up and down. Uses a Lanczos
/// exponential propagator with full reorthogonalization; unitary to machine
/// precision by construction.
/// Throws SizeCapError above options.max_spins and Error on norm drift.
EvolveResult exact_evolve(const CouplingMatrix& cm, double b_transverse, double theta,
                          std::span<const double> times, const EvolveOptions& options = {});

/// Mean over spins of mean_field_field with <sigma^z> = cos(theta): the
/// global excess precession rate the theta-scan measurement fits. Equals
/// 2 J-bar cos(theta).
std::vector<double> excess_precession_curve(const CouplingMatrix& cm,
                                            std::span<const double> thetas);

}  // namespace iontrap
