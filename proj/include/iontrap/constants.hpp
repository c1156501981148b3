#pragma once

#include <numbers>

namespace iontrap {

/// CODATA 2018 physical constants, SI units.
struct PhysicalConstants {
  double elementary_charge = 1.602176634e-19;     ///< C
  double vacuum_permittivity = 8.8541878128e-12;  ///< F/m
  /// 1/(4 pi eps0), N m^2/C^2
  double coulomb_constant = 1.0 / (4.0 * std::numbers::pi * vacuum_permittivity);
  double reduced_planck = 1.054571817e-34;      ///< J s
  double vacuum_permeability = 1.25663706212e-6;  ///< N/A^2
  double bohr_magneton = 9.2740100783e-24;      ///< J/T
  double atomic_mass_unit = 1.66053906660e-27;  ///< kg
  double electron_mass = 9.1093837015e-31;      ///< kg
  double boltzmann = 1.380649e-23;              ///< J/K

  /// 9Be+ ion mass: atomic mass 9.0121831 u minus one electron mass,
  /// about 1.496417e-26 kg.
  double beryllium9_ion_mass() const {
    return 9.0121831 * atomic_mass_unit - electron_mass;
  }

  /// Throws std::invalid_argument if any constant is non-positive or
  /// coulomb_constant disagrees with 1/(4 pi eps0) beyond 1e-12 relative.
  void validate() const;
};

}  // namespace iontrap
