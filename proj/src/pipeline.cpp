#include "iontrap/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>
#include <vector>

#include <json.hpp>

#include "iontrap/couplings.hpp"
#include "iontrap/crystal.hpp"
#include "iontrap/errors.hpp"
#include "iontrap/io.hpp"
#include "iontrap/modes.hpp"
#include "iontrap/spin_dynamics.hpp"

namespace iontrap {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

ordered_json echo_inputs(const RunConfig& config, const TrapSpec& spec, const OdfSpec& odf) {
  ordered_json inputs;
  inputs["species"] = {{"mass_u", config.mass_u},
                       {"charge_e", config.charge_e},
                       {"ion_mass_kg", spec.ion_mass},
                       {"ion_charge_c", spec.ion_charge}};
  inputs["trap"] = {{"b0_tesla", spec.b_field},
                    {"f_z_hz", config.f_z_hz},
                    {"f_r_hz", config.f_r_hz},
                    {"omega_z_rad_s", spec.omega_z},
                    {"omega_r_rad_s", spec.omega_r}};
  inputs["crystal"] = {{"n_ions", config.n_ions},
                       {"tol", config.tol},
                       {"max_iter", config.max_iter},
                       {"jitter_seed", config.jitter_seed}};
  inputs["odf"] = {{"f0_newton", odf.f0},
                   {"f_mu_hz", config.f_mu_hz},
                   {"mu_r_rad_s", odf.mu_r},
                   {"theta_r_deg", config.theta_r_deg},
                   {"theta_r_rad", odf.theta_r},
                   {"wavelength_m", odf.optical_wavelength},
                   {"temperature_k", odf.temperature},
                   {"guard_band_rel", odf.guard_band_rel}};
  inputs["dynamics"] = {{"theta_rad", config.theta_rad},
                        {"b_transverse_hz", config.b_transverse_hz},
                        {"b_transverse_rad_s", kTwoPi * config.b_transverse_hz},
                        {"t_start_s", config.t_start_s},
                        {"t_stop_s", config.t_stop_s},
                        {"t_steps", config.t_steps}};
  inputs["sweep"] = {{"detunings_hz", config.detunings_hz}};
  inputs["output"] = {{"directory", config.directory}, {"format", config.format}};
  return inputs;
}

std::vector<double> linspace(double start, double stop, int count) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    out.push_back(start);
    return out;
  }
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) out.push_back(start + step * i);
  return out;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
  if (dynamic_cast<const SizeCapError*>(&error)) return kExitConfig;
  if (dynamic_cast<const NonConvergenceError*>(&error)) return kExitNonConvergence;
  if (dynamic_cast<const RadialConfinementError*>(&error)) return kExitPhysics;
  if (dynamic_cast<const CoincidentIonsError*>(&error)) return kExitPhysics;
  if (dynamic_cast<const UnstablePlanarCrystalError*>(&error)) return kExitPhysics;
  if (dynamic_cast<const ResonanceError*>(&error)) return kExitPhysics;
  if (dynamic_cast<const DegenerateFitError*>(&error)) return kExitPhysics;
  if (dynamic_cast<const UnsupportedPreparationError*>(&error)) return kExitPhysics;
  if (dynamic_cast<const std::invalid_argument*>(&error)) return kExitConfig;
  return kExitInternal;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& config, std::ostream& log,
                bool quiet) {
  static const std::set<std::string> kCommands = {"equilibrate", "modes",    "couplings",
                                                  "sweep",       "dynamics", "validate"};
  try {
    if (!kCommands.count(command)) {
      throw ConfigError("unknown command '" + command +
                        "' (expected equilibrate|modes|couplings|sweep|dynamics|validate)");
    }
    config.validate();

    const PhysicalConstants constants;
    const TrapSpec spec = to_trap_spec(config, constants);
    const OdfSpec odf = to_odf_spec(config);
    const bool json_format = config.format == "json";

    const fs::path out_dir(config.directory);
    fs::create_directories(out_dir);
    const auto table_path = [&](const char* stem) {
      return out_dir / (std::string(stem) + (json_format ? ".json" : ".csv"));
    };

    Stopwatch total;
    ordered_json summary;
    summary["command"] = command;
    summary["inputs"] = echo_inputs(config, spec, odf);
    ordered_json timings;

    const double beta = rotating_frame_beta(spec);
    const CharacteristicLengths lengths = characteristic_lengths(spec, constants);
    summary["derived"] = {
        {"cyclotron_rad_s", cyclotron_frequency(spec)},
        {"beta", beta},
        {"axial_length_m", lengths.axial},
        {"planar_length_m", lengths.planar},
        {"gradient_tolerance_n", config.tol * spec.ion_mass * spec.omega_z * spec.omega_z *
                                     beta * lengths.planar}};

    const auto finish = [&](int code) {
      timings["total_s"] = total.seconds();
      summary["timings"] = timings;
      std::ofstream out(out_dir / "summary.json", std::ios::binary);
      out << summary.dump(2) << "\n";
      if (!out) {
        log << "error: cannot write " << (out_dir / "summary.json").string() << "\n";
        return static_cast<int>(kExitInternal);
      }
      return code;
    };

    if (command == "validate") {
      const int failures = run_validation_suite(log);
      summary["validate"] = {{"failures", failures}};
      return finish(failures == 0 ? kExitOk : kExitValidationFailed);
    }

    // equilibrate
    Stopwatch clock;
    EquilibrationOptions eq_options;
    eq_options.tolerance =
        config.tol * spec.ion_mass * spec.omega_z * spec.omega_z * beta * lengths.planar;
    eq_options.max_iterations = config.max_iter;
    const Crystal crystal = find_equilibrium(
        seed_lattice(config.n_ions, spec, {1e-3, config.jitter_seed}, constants), spec,
        eq_options, constants);
    timings["equilibrate_s"] = clock.seconds();
    if (!quiet) {
      log << "equilibrate: N = " << config.n_ions << ", " << crystal.iterations
          << " iterations, max |gradient| = " << crystal.gradient_norm << " N\n";
    }
    json_format ? write_crystal_json(table_path("crystal"), crystal)
                : write_crystal_csv(table_path("crystal"), crystal);
    ordered_json crystal_json = {{"n_ions", config.n_ions},
                                 {"energy_j", crystal.energy},
                                 {"gradient_norm_n", crystal.gradient_norm},
                                 {"iterations", crystal.iterations}};
    if (config.n_ions >= 2) {
      const SpacingStats stats = nn_spacing_stats(crystal);
      crystal_json["nn_min_m"] = stats.min;
      crystal_json["nn_median_m"] = stats.median;
      crystal_json["nn_max_m"] = stats.max;
    }
    summary["crystal"] = crystal_json;
    if (command == "equilibrate") return finish(kExitOk);

    // modes
    clock = Stopwatch();
    const ModeSpectrum spectrum = mode_spectrum(crystal, constants);
    timings["modes_s"] = clock.seconds();
    if (json_format) {
      write_modes_json(table_path("modes"), spectrum);
      write_eigenvectors_json(table_path("modes_eigenvectors"), spectrum);
    } else {
      write_modes_csv(table_path("modes"), spectrum);
      write_eigenvectors_csv(table_path("modes_eigenvectors"), spectrum);
    }
    const StabilityReport stability = check_planar_stability(crystal, constants);
    summary["modes"] = {
        {"omega_max_rad_s", spectrum.frequencies(0)},
        {"omega_min_rad_s", spectrum.frequencies(spectrum.frequencies.size() - 1)},
        {"com_index", spectrum.com_index},
        {"stable", stability.stable},
        {"stability_margin_n_per_m", stability.margin}};
    if (!quiet) {
      log << "modes: band [" << spectrum.frequencies(spectrum.frequencies.size() - 1) / kTwoPi
          << ", " << spectrum.frequencies(0) / kTwoPi << "] Hz\n";
    }
    if (command == "modes") return finish(kExitOk);

    // couplings and beyond share the Lamb-Dicke report
    const LambDickeReport lamb_dicke = lamb_dicke_check(spectrum, odf, spec, constants);
    double worst_eta = 0.0;
    for (const LambDickeMode& mode : lamb_dicke.modes) worst_eta = std::max(worst_eta, mode.eta);
    summary["lamb_dicke"] = {
        {"threshold", lamb_dicke.threshold},
        {"pass", lamb_dicke.pass},
        {"com_eta", lamb_dicke.modes[static_cast<std::size_t>(spectrum.com_index)].eta},
        {"worst_eta", worst_eta}};

    if (command == "sweep") {
      clock = Stopwatch();
      std::vector<double> detunings;
      detunings.reserve(config.detunings_hz.size());
      for (double hz : config.detunings_hz) detunings.push_back(kTwoPi * hz);
      const std::vector<SweepRow> rows =
          detuning_sweep(crystal, spectrum, odf, detunings, constants);
      timings["sweep_s"] = clock.seconds();
      json_format ? write_sweep_json(table_path("sweep"), rows, spectrum.frequencies(0))
                  : write_sweep_csv(table_path("sweep"), rows, spectrum.frequencies(0));
      int failed = 0;
      for (const SweepRow& row : rows) {
        if (!row.ok) {
          ++failed;
          if (!quiet) log << "sweep: row at " << row.detuning / kTwoPi << " Hz failed: "
                          << row.message << "\n";
        }
      }
      summary["sweep"] = {{"rows", rows.size()}, {"failed", failed}};
      return finish(kExitOk);
    }

    clock = Stopwatch();
    const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf, constants);
    timings["couplings_s"] = clock.seconds();
    json_format ? write_couplings_json(table_path("couplings"), crystal, cm)
                : write_couplings_csv(table_path("couplings"), crystal, cm);
    summary["couplings"] = {{"mu_r_rad_s", cm.mu_r},
                            {"jbar_rad_s", cm.jbar},
                            {"power_law_a", cm.power_law_a},
                            {"fit_rms", cm.fit_rms}};
    if (!quiet) {
      log << "couplings: jbar = " << cm.jbar << " rad/s, a = " << cm.power_law_a << "\n";
    }
    if (command == "couplings") return finish(kExitOk);

    // dynamics
    clock = Stopwatch();
    const std::vector<double> times = linspace(config.t_start_s, config.t_stop_s, config.t_steps);
    const double b_transverse = kTwoPi * config.b_transverse_hz;
    EvolveResult evolution;
    const EvolveOptions evolve_options;
    std::string dynamics_mode;
    if (config.n_ions <= evolve_options.max_spins) {
      dynamics_mode = "exact";
      evolution = exact_evolve(cm, b_transverse, config.theta_rad, times, evolve_options);
    } else {
      if (b_transverse != 0.0 ||
          std::abs(config.theta_rad - 0.5 * std::numbers::pi) > 1e-9) {
        throw ConfigError(
            "dynamics: exact evolution is capped at " +
            std::to_string(evolve_options.max_spins) +
            " spins; above that only the closed form applies, which requires "
            "theta_rad = pi/2 and b_transverse_hz = 0");
      }
      dynamics_mode = "closed_form";
      evolution.times = times;
      evolution.sx = analytic_depolarization(cm, times, config.theta_rad);
      evolution.sy = Eigen::MatrixXd::Zero(evolution.sx.rows(), evolution.sx.cols());
      evolution.sz = Eigen::MatrixXd::Zero(evolution.sx.rows(), evolution.sx.cols());
      evolution.sx_mean = evolution.sx.rowwise().mean();
      evolution.sy_mean = Eigen::VectorXd::Zero(evolution.sx.rows());
      evolution.sz_mean = Eigen::VectorXd::Zero(evolution.sx.rows());
    }
    json_format ? write_dynamics_json(table_path("dynamics"), evolution)
                : write_dynamics_csv(table_path("dynamics"), evolution);

    const std::vector<double> thetas = linspace(0.0, std::numbers::pi, 25);
    const std::vector<double> rates = excess_precession_curve(cm, thetas);
    json_format ? write_precession_json(table_path("precession"), thetas, rates)
                : write_precession_csv(table_path("precession"), thetas, rates);
    timings["dynamics_s"] = clock.seconds();
    summary["dynamics"] = {{"mode", dynamics_mode},
                           {"theta_rad", config.theta_rad},
                           {"b_transverse_rad_s", b_transverse},
                           {"t_steps", config.t_steps},
                           {"max_norm_drift", evolution.max_norm_drift}};
    if (!quiet) log << "dynamics: " << dynamics_mode << ", " << times.size() << " samples\n";
    return finish(kExitOk);
  } catch (const std::exception& error) {
    log << "error: " << error.what() << "\n";
    return exit_code_for(error);
  }
}

}  // namespace iontrap
