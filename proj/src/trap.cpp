#include "iontrap/trap.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "iontrap/errors.hpp"

namespace iontrap {

void PhysicalConstants::validate() const {
  const double values[] = {elementary_charge, vacuum_permittivity, coulomb_constant,
                           reduced_planck,    vacuum_permeability, bohr_magneton,
                           atomic_mass_unit,  electron_mass,       boltzmann};
  for (double v : values) {
    if (!(v > 0.0)) {
      throw std::invalid_argument("PhysicalConstants: all constants must be positive");
    }
  }
  const double expected = 1.0 / (4.0 * std::numbers::pi * vacuum_permittivity);
  if (std::abs(coulomb_constant - expected) > 1e-12 * expected) {
    throw std::invalid_argument(
        "PhysicalConstants: coulomb_constant inconsistent with vacuum_permittivity");
  }
}

TrapSpec TrapSpec::beryllium_default(const PhysicalConstants& constants) {
  TrapSpec spec;
  spec.ion_mass = constants.beryllium9_ion_mass();
  spec.ion_charge = constants.elementary_charge;
  spec.b_field = 4.46;
  spec.omega_z = 2.0 * std::numbers::pi * 795e3;
  spec.omega_r = 2.0 * std::numbers::pi * 45e3;
  return spec;
}

void TrapSpec::validate() const {
  if (!(ion_mass > 0.0)) throw std::invalid_argument("TrapSpec: ion_mass must be positive");
  if (!(ion_charge > 0.0)) throw std::invalid_argument("TrapSpec: ion_charge must be positive");
  if (!(b_field > 0.0)) throw std::invalid_argument("TrapSpec: b_field must be positive");
  if (!(omega_z > 0.0)) throw std::invalid_argument("TrapSpec: omega_z must be positive");
  const double omega_c = cyclotron_frequency(*this);
  if (!(omega_r > 0.0) || !(omega_r < omega_c)) {
    std::ostringstream msg;
    msg << "TrapSpec: require 0 < omega_r < cyclotron frequency (omega_r = " << omega_r
        << " rad/s, Omega_c = " << omega_c << " rad/s)";
    throw std::invalid_argument(msg.str());
  }
}

double cyclotron_frequency(const TrapSpec& spec) {
  return spec.ion_charge * spec.b_field / spec.ion_mass;
}

double rotating_frame_beta(const TrapSpec& spec) {
  spec.validate();
  const double omega_c = cyclotron_frequency(spec);
  const double beta =
      spec.omega_r / (spec.omega_z * spec.omega_z) * (omega_c - spec.omega_r) - 0.5;
  if (!(beta > 0.0)) {
    std::ostringstream msg;
    msg << "rotating_frame_beta: beta = " << beta
        << " <= 0, no in-plane confinement in the rotating frame";
    throw RadialConfinementError(msg.str());
  }
  return beta;
}

CharacteristicLengths characteristic_lengths(const TrapSpec& spec,
                                             const PhysicalConstants& constants) {
  const double beta = rotating_frame_beta(spec);
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  const double axial = std::cbrt(kq2 / (spec.ion_mass * spec.omega_z * spec.omega_z));
  return {axial, axial / std::cbrt(beta)};
}

PairEnergyScales pair_energy_scales(double separation, const TrapSpec& spec,
                                    const PhysicalConstants& constants) {
  if (!(separation > 0.0)) {
    throw std::invalid_argument("pair_energy_scales: separation must be positive");
  }
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  const double mu_b = constants.bohr_magneton;
  const double dipole = constants.vacuum_permeability * mu_b * mu_b /
                        (4.0 * std::numbers::pi * separation * separation * separation);
  return {kq2 / separation, dipole};
}

}  // namespace iontrap
