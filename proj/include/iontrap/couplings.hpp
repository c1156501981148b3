#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "iontrap/constants.hpp"
#include "iontrap/crystal.hpp"
#include "iontrap/modes.hpp"

namespace iontrap {

/// Spin-dependent optical dipole force drive: a walking-wave lattice from two
/// beams crossing at theta_r with beatnote mu_r.
struct OdfSpec {
  double f0 = 2e-23;                  ///< force amplitude on each spin, N
  double mu_r = 0.0;                  ///< beatnote, rad/s
  double theta_r = 0.0;               ///< beam crossing angle, rad
  double optical_wavelength = 313e-9; ///< m
  double temperature = 1e-3;          ///< K, for the Lamb-Dicke check
  double guard_band_rel = 1e-6;       ///< resonance guard half-width in units of omega_z
  double lamb_dicke_threshold = 1.0;  ///< |dk| z_rms must stay below this

  void validate() const;  ///< throws std::invalid_argument
};

struct OdfWavevector {
  double delta_k;   ///< |dk| = 2 (2 pi / lambda) sin(theta_r / 2), 1/m
  double lambda_r;  ///< effective wavelength 2 pi / |dk|, m
};

OdfWavevector odf_wavevector(const OdfSpec& odf);

struct LambDickeMode {
  double omega;                ///< rad/s
  double ground_state_length;  ///< sqrt(hbar / (2 m omega)), m
  double rms_z;                ///< thermal RMS extent, m
  double eta;                  ///< |dk| * rms_z
  bool pass;
};

struct LambDickeReport {
  std::vector<LambDickeMode> modes;  ///< spectrum order (descending frequency)
  double threshold;
  bool pass;  ///< every mode below threshold
};

/// Per-mode Lamb-Dicke confinement check. Thermal occupation enters through
/// the coth law, 2 nbar + 1 = coth(hbar omega / (2 kB T)); temperature <= 0
/// reduces to the ground state.
LambDickeReport lamb_dicke_check(const ModeSpectrum& spectrum, const OdfSpec& odf,
                                 const TrapSpec& spec,
                                 const PhysicalConstants& constants = {});

/// Engineered Ising couplings, angular-frequency units.
struct CouplingMatrix {
  Eigen::MatrixXd j;   ///< symmetric, zero diagonal, rad/s
  double jbar = 0.0;   ///< (1/N^2) sum_{i != j} J_ij
  double power_law_a;  ///< fitted range exponent; NaN when the fit is undefined
  double fit_rms;      ///< log-log residual RMS; NaN with power_law_a
  double mu_r = 0.0;   ///< beatnote used, rad/s
};

/// Driven-phonon mode sum over all N transverse modes:
/// J_ij = (F0^2 N / (2 hbar m)) sum_m b_im b_jm / (mu_r^2 - omega_m^2).
/// Throws ResonanceError when mu_r falls within guard_band_rel * omega_z of
/// any mode. The fitted power law is populated when N >= 3 and well defined.
CouplingMatrix coupling_matrix(const Crystal& crystal, const ModeSpectrum& spectrum,
                               const OdfSpec& odf, const PhysicalConstants& constants = {});

/// Closed-form two-ion coupling through the COM and tilt modes; the
/// independent oracle for coupling_matrix at N = 2.
double two_ion_closed_form(double separation, const TrapSpec& spec, const OdfSpec& odf,
                           const PhysicalConstants& constants = {});

/// Quadratic-response pair energies for a static spin-dependent force f0:
/// E(sigma) = -(1/2) f0^2 sigma^T K^-1 sigma, returned as the pair-coefficient
/// matrix C_ij = -f0^2 (K^-1)_ij in joules. Relates to the oscillating drive
/// by C_ij = 2 hbar J_ij(mu_r -> 0) / N (factor 2 from cos^2 time averaging).
Eigen::MatrixXd static_adiabatic_oracle(const Crystal& crystal, double f0,
                                        const PhysicalConstants& constants = {});

/// (1/N^2) sum over ordered pairs i != j; the quantity the excess-precession
/// measurement extracts.
double mean_coupling(const CouplingMatrix& cm);

struct PowerLawFit {
  double a;        ///< range exponent, J ~ 1/d^a
  double fit_rms;  ///< RMS residual of log|J| about the fit
};

/// Unweighted least squares of log|J_ij| against log d_ij over all pairs with
/// J_ij != 0. Throws DegenerateFitError for N < 3 or fewer than two distinct
/// pair distances.
PowerLawFit fit_power_law(const CouplingMatrix& cm, const Crystal& crystal);

struct SweepRow {
  double detuning = 0.0;  ///< rad/s above the COM mode
  double jbar = 0.0;
  double power_law_a = 0.0;
  double fit_rms = 0.0;
  bool ok = false;
  std::string message;  ///< nonempty when the row failed (e.g. resonance)
};

/// J-bar and power law for each beatnote mu_r = omega_COM + detuning. Rows
/// keep the input order; per-row resonance failures are recorded, not thrown.
std::vector<SweepRow> detuning_sweep(const Crystal& crystal, const ModeSpectrum& spectrum,
                                     const OdfSpec& base, std::span<const double> detunings,
                                     const PhysicalConstants& constants = {});

}  // namespace iontrap
