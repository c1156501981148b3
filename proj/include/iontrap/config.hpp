#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iontrap/constants.hpp"
#include "iontrap/couplings.hpp"
#include "iontrap/trap.hpp"

namespace iontrap {

/// Batch-run configuration. File values use ordinary frequencies in Hz and
/// angles in degrees where noted; conversion to angular units happens in
/// to_trap_spec / to_odf_spec so the library never sees mixed conventions.
/// Defaults are the 9Be+ operating point.
struct RunConfig {
  // [species] neutral atomic mass; the loader subtracts charge_e electron masses
  double mass_u = 9.0121831;
  double charge_e = 1.0;

  // [trap]
  double b0_tesla = 4.46;
  double f_z_hz = 795e3;
  double f_r_hz = 45e3;

  // [crystal]
  int n_ions = 217;
  double tol = 1e-6;  ///< gradient tolerance relative to m omega_z^2 beta l_p
  int max_iter = 20000;
  std::uint64_t jitter_seed = 12345;

  // [odf]
  double f0_newton = 2e-23;
  double f_mu_hz = 796e3;  ///< beatnote, 1 kHz above the COM mode by default
  double theta_r_deg = 4.8;
  double wavelength_m = 313e-9;
  double temperature_k = 1e-3;
  double guard_band_rel = 1e-6;

  // [dynamics]
  double theta_rad = 1.5707963267948966;  ///< pi/2
  double b_transverse_hz = 0.0;
  double t_start_s = 0.0;
  double t_stop_s = 10e-3;
  int t_steps = 101;

  // [sweep]
  std::vector<double> detunings_hz = {500, 1000, 5000, 10000, 50000, 100000};

  // [output]
  std::string directory = "out";
  std::string format = "csv";  ///< csv | json

  void validate() const;  ///< throws ConfigError naming the offending key
};

/// Parses the sectioned key = value format described in the README. An empty
/// file yields the defaults. Unknown sections or keys are hard errors with
/// line context; so are malformed numbers.
RunConfig load_config(const std::string& path);

/// Same parser on in-memory text (used by load_config and the tests).
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

TrapSpec to_trap_spec(const RunConfig& config, const PhysicalConstants& constants = {});
OdfSpec to_odf_spec(const RunConfig& config);

}  // namespace iontrap
