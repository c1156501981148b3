#include "iontrap/modes.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "iontrap/errors.hpp"

namespace iontrap {

Eigen::MatrixXd stiffness_matrix(const Crystal& crystal, const PhysicalConstants& constants) {
  const Eigen::Index n = crystal.positions.rows();
  const TrapSpec& spec = crystal.trap;
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  const double axial_spring = spec.ion_mass * spec.omega_z * spec.omega_z;

  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
      if (d < kMinIonSeparation) {
        throw CoincidentIonsError("stiffness_matrix: two ions closer than 1e-12 m");
      }
      const double w = kq2 / (d * d * d);
      k(i, j) = w;
      k(j, i) = w;
      k(i, i) -= w;
      k(j, j) -= w;
    }
  }
  k.diagonal().array() += axial_spring;
  return k;
}

ModeSpectrum mode_spectrum(const Crystal& crystal, const PhysicalConstants& constants) {
  const Eigen::Index n = crystal.positions.rows();
  const Eigen::MatrixXd k = stiffness_matrix(crystal, constants);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k / crystal.trap.ion_mass);
  if (solver.info() != Eigen::Success) {
    throw Error("mode_spectrum: eigendecomposition failed");
  }
  const Eigen::VectorXd& omega_sq = solver.eigenvalues();  // ascending
  if (omega_sq(0) <= 0.0) {
    std::ostringstream msg;
    msg << "mode_spectrum: smallest squared mode frequency " << omega_sq(0)
        << " <= 0, single-plane crystal unstable";
    throw UnstablePlanarCrystalError(msg.str());
  }

  ModeSpectrum spectrum;
  spectrum.frequencies.resize(n);
  spectrum.eigenvectors.resize(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    const Eigen::Index src = n - 1 - m;  // descending frequency order
    spectrum.frequencies(m) = std::sqrt(omega_sq(src));
    spectrum.eigenvectors.col(m) = solver.eigenvectors().col(src);
  }

  // Deterministic sign: first component above noise made positive.
  for (Eigen::Index m = 0; m < n; ++m) {
    auto column = spectrum.eigenvectors.col(m);
    const double threshold = 1e-12 * column.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(column(i)) > threshold) {
        if (column(i) < 0.0) column *= -1.0;
        break;
      }
    }
  }

  // COM mode: minimal variance of eigenvector components.
  int best = 0;
  double best_variance = std::numeric_limits<double>::infinity();
  for (Eigen::Index m = 0; m < n; ++m) {
    const double mean = spectrum.eigenvectors.col(m).mean();
    const double variance =
        (spectrum.eigenvectors.col(m).array() - mean).square().sum() / static_cast<double>(n);
    if (variance < best_variance) {
      best_variance = variance;
      best = static_cast<int>(m);
    }
  }
  spectrum.com_index = best;
  return spectrum;
}

StabilityReport check_planar_stability(const Crystal& crystal,
                                       const PhysicalConstants& constants) {
  const Eigen::MatrixXd k = stiffness_matrix(crystal, constants);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k, Eigen::EigenvaluesOnly);
  const double min_eigenvalue = solver.eigenvalues()(0);
  StabilityReport report;
  report.margin = min_eigenvalue;  // equals m omega_z^2 - lambda_max(Laplacian)
  report.min_omega_sq = min_eigenvalue / crystal.trap.ion_mass;
  report.stable = min_eigenvalue > 0.0;
  return report;
}

StabilityReport check_planar_stability(const ModeSpectrum& spectrum, double ion_mass) {
  const double omega_min = spectrum.frequencies(spectrum.frequencies.size() - 1);
  StabilityReport report;
  report.min_omega_sq = omega_min * omega_min;
  report.margin = ion_mass * report.min_omega_sq;
  report.stable = report.min_omega_sq > 0.0;
  return report;
}

}  // namespace iontrap
