#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "iontrap/crystal.hpp"
#include "iontrap/errors.hpp"
#include "iontrap/modes.hpp"
#include "iontrap/trap.hpp"

using namespace iontrap;

namespace {

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

const TrapSpec kTrap = TrapSpec::beryllium_default();

Crystal two_ion_crystal(double separation) {
  Crystal crystal;
  crystal.trap = kTrap;
  crystal.positions.resize(2, 2);
  crystal.positions << -separation / 2, 0.0, separation / 2, 0.0;
  return crystal;
}

}  // namespace

TEST_CASE("single ion stiffness and mode") {
  Crystal crystal;
  crystal.trap = kTrap;
  crystal.positions = PositionMatrix::Zero(1, 2);
  const Eigen::MatrixXd k = stiffness_matrix(crystal);
  REQUIRE(k.rows() == 1);
  CHECK(rel_err(k(0, 0), kTrap.ion_mass * kTrap.omega_z * kTrap.omega_z) < 1e-15);

  const ModeSpectrum spectrum = mode_spectrum(crystal);
  CHECK(rel_err(spectrum.frequencies(0), kTrap.omega_z) < 1e-15);
  CHECK(spectrum.eigenvectors(0, 0) == 1.0);
  CHECK(spectrum.com_index == 0);
}

TEST_CASE("stiffness rows sum to m omega_z^2") {
  const Crystal crystal = find_equilibrium(seed_lattice(19, kTrap), kTrap);
  const Eigen::MatrixXd k = stiffness_matrix(crystal);
  const double expected = kTrap.ion_mass * kTrap.omega_z * kTrap.omega_z;
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    CHECK(rel_err(k.row(i).sum(), expected) < 1e-12);
  }
}

TEST_CASE("two-ion stiffness off-diagonal at 20 um") {
  const Eigen::MatrixXd k = stiffness_matrix(two_ion_crystal(20e-6));
  CHECK(rel_err(k(0, 1), 2.8838469404271704e-14) < 1e-12);  // k q^2 / d^3
  CHECK(k(0, 1) == k(1, 0));
}

TEST_CASE("two-ion modes: COM at omega_z, tilt softened") {
  const ModeSpectrum spectrum = mode_spectrum(two_ion_crystal(20e-6));
  CHECK(rel_err(spectrum.frequencies(0), kTrap.omega_z) < 1e-12);
  CHECK(rel_err(spectrum.frequencies(1), 4593148.289696757) < 1e-12);  // ~ 2 pi x 731 kHz
  CHECK(rel_err(spectrum.frequencies(1), 2.0 * std::numbers::pi * 731e3) < 1e-4);

  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(spectrum.eigenvectors(0, 0) - inv_sqrt2) < 1e-12);
  CHECK(std::abs(spectrum.eigenvectors(1, 0) - inv_sqrt2) < 1e-12);
  CHECK(std::abs(spectrum.eigenvectors(0, 1) - inv_sqrt2) < 1e-12);   // sign convention
  CHECK(std::abs(spectrum.eigenvectors(1, 1) + inv_sqrt2) < 1e-12);
  CHECK(spectrum.com_index == 0);
}

TEST_CASE("anomalous dispersion: COM is the highest mode with uniform eigenvector") {
  for (int n : {2, 7, 50}) {
    const Crystal crystal = find_equilibrium(seed_lattice(n, kTrap), kTrap);
    const ModeSpectrum spectrum = mode_spectrum(crystal);
    CHECK(rel_err(spectrum.frequencies(0), kTrap.omega_z) < 1e-9);
    CHECK(spectrum.com_index == 0);
    const auto com = spectrum.eigenvectors.col(spectrum.com_index);
    CHECK(com.maxCoeff() - com.minCoeff() < 1e-8);
    CHECK(spectrum.frequencies(spectrum.frequencies.size() - 1) > 0.0);
  }
}

TEST_CASE("eigenvectors are orthonormal and complete") {
  const Crystal crystal = find_equilibrium(seed_lattice(19, kTrap), kTrap);
  const ModeSpectrum spectrum = mode_spectrum(crystal);
  const Eigen::MatrixXd gram = spectrum.eigenvectors.transpose() * spectrum.eigenvectors;
  CHECK((gram - Eigen::MatrixXd::Identity(19, 19)).cwiseAbs().maxCoeff() < 1e-10);
  // completeness: sum_m b_im b_jm = delta_ij
  const Eigen::MatrixXd outer = spectrum.eigenvectors * spectrum.eigenvectors.transpose();
  CHECK((outer - Eigen::MatrixXd::Identity(19, 19)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigenvalue residuals are small") {
  const Crystal crystal = find_equilibrium(seed_lattice(19, kTrap), kTrap);
  const ModeSpectrum spectrum = mode_spectrum(crystal);
  const Eigen::MatrixXd k = stiffness_matrix(crystal);
  const double scale = kTrap.ion_mass * kTrap.omega_z * kTrap.omega_z;
  for (Eigen::Index m = 0; m < 19; ++m) {
    const double lambda =
        kTrap.ion_mass * spectrum.frequencies(m) * spectrum.frequencies(m);
    const double residual =
        (k * spectrum.eigenvectors.col(m) - lambda * spectrum.eigenvectors.col(m)).norm();
    CHECK(residual < 1e-8 * scale);
  }
}

TEST_CASE("close pair destabilizes the plane") {
  // 2 k q^2 / (m d^3) > omega_z^2 at 5 um for these parameters
  const Crystal crystal = two_ion_crystal(5e-6);
  CHECK_THROWS_AS(mode_spectrum(crystal), UnstablePlanarCrystalError);
  const StabilityReport report = check_planar_stability(crystal);
  CHECK_FALSE(report.stable);
  CHECK(report.min_omega_sq < 0.0);
  CHECK(report.margin < 0.0);
}

TEST_CASE("stability report for a healthy crystal") {
  const Crystal crystal = two_ion_crystal(20e-6);
  const StabilityReport report = check_planar_stability(crystal);
  CHECK(report.stable);
  CHECK(rel_err(std::sqrt(report.min_omega_sq), 4593148.289696757) < 1e-12);

  const ModeSpectrum spectrum = mode_spectrum(crystal);
  const StabilityReport from_spectrum = check_planar_stability(spectrum, kTrap.ion_mass);
  CHECK(from_spectrum.stable);
  CHECK(rel_err(from_spectrum.min_omega_sq, report.min_omega_sq) < 1e-12);
  CHECK(rel_err(from_spectrum.margin, report.margin) < 1e-12);
}
