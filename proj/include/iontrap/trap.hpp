#pragma once

#include "iontrap/constants.hpp"

namespace iontrap {

/// Trap and rotation parameters for a single-species crystal.
/// All frequencies are angular (rad/s); file loaders convert from Hz.
struct TrapSpec {
  double ion_mass = 0.0;    ///< kg
  double ion_charge = 0.0;  ///< C
  double b_field = 0.0;     ///< T
  double omega_z = 0.0;     ///< axial trap frequency, rad/s
  double omega_r = 0.0;     ///< crystal rotation frequency, rad/s

  /// 9Be+ at B0 = 4.46 T, omega_z = 2pi x 795 kHz, omega_r = 2pi x 45 kHz.
  static TrapSpec beryllium_default(const PhysicalConstants& constants = {});

  /// Throws std::invalid_argument unless ion_mass, ion_charge, b_field,
  /// omega_z are positive and 0 < omega_r < cyclotron frequency.
  void validate() const;
};

/// Omega_c = q B / m. Pure formula; does not validate the spec.
double cyclotron_frequency(const TrapSpec& spec);

/// Dimensionless radial confinement strength in the rotating frame,
/// beta = omega_r (Omega_c - omega_r) / omega_z^2 - 1/2.
/// Throws RadialConfinementError when beta <= 0.
double rotating_frame_beta(const TrapSpec& spec);

struct CharacteristicLengths {
  double axial;   ///< l0 = (k q^2 / (m omega_z^2))^(1/3), m
  double planar;  ///< l_p = l0 / beta^(1/3), m
};

CharacteristicLengths characteristic_lengths(const TrapSpec& spec,
                                             const PhysicalConstants& constants = {});

/// Energy scales of a single ion pair at separation d: the Coulomb energy
/// k q^2/d and the magnetic dipole-dipole energy mu0 muB^2/(4 pi d^3).
/// The dipole scale is ~16 orders of magnitude smaller at crystal spacings,
/// which is why engineered spin-dependent forces are needed at all.
struct PairEnergyScales {
  double coulomb;          ///< J
  double magnetic_dipole;  ///< J
};

PairEnergyScales pair_energy_scales(double separation, const TrapSpec& spec,
                                    const PhysicalConstants& constants = {});

}  // namespace iontrap
