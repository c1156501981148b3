// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exits nonzero if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "iontrap/config.hpp"
#include "iontrap/couplings.hpp"
#include "iontrap/crystal.hpp"
#include "iontrap/errors.hpp"
#include "iontrap/modes.hpp"
#include "iontrap/pipeline.hpp"
#include "iontrap/random.hpp"
#include "iontrap/spin_dynamics.hpp"
#include "iontrap/trap.hpp"

using namespace iontrap;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

OdfSpec drive_odf(double mu_r) {
  OdfSpec odf;
  odf.f0 = 2e-23;
  odf.mu_r = mu_r;
  odf.theta_r = 4.8 * kPi / 180.0;
  odf.optical_wavelength = 313e-9;
  return odf;
}

// Shared full-scale pipeline state, built once.
struct Context {
  TrapSpec spec = TrapSpec::beryllium_default();
  PhysicalConstants constants;
  Crystal crystal217;
  ModeSpectrum spectrum217;
  double equilibrate_seconds = 0.0;
  double modes_seconds = 0.0;
  std::vector<double> grid_detunings;           // rad/s
  std::vector<CouplingMatrix> grid_couplings;   // same order

  void build() {
    double t0 = now_seconds();
    crystal217 = find_equilibrium(seed_lattice(217, spec), spec);
    equilibrate_seconds = now_seconds() - t0;

    t0 = now_seconds();
    spectrum217 = mode_spectrum(crystal217);
    modes_seconds = now_seconds() - t0;

    for (double khz : {0.5, 1.0, 5.0, 10.0, 50.0, 100.0}) {
      grid_detunings.push_back(2.0 * kPi * khz * 1e3);
    }
    for (double detuning : grid_detunings) {
      grid_couplings.push_back(coupling_matrix(
          crystal217, spectrum217, drive_odf(spectrum217.frequencies(0) + detuning)));
    }
  }
};

struct Criterion {
  std::string name;
  std::function<bool(Context&, std::string&)> run;
};

bool criterion_com_mode(Context& ctx, std::string& detail) {
  for (int n : {2, 7, 50}) {
    const Crystal crystal = find_equilibrium(seed_lattice(n, ctx.spec), ctx.spec);
    const ModeSpectrum spectrum = mode_spectrum(crystal);
    if (rel_err(spectrum.frequencies(0), ctx.spec.omega_z) > 1e-9) {
      detail = "N=" + std::to_string(n) + " top mode off omega_z";
      return false;
    }
    const auto com = spectrum.eigenvectors.col(spectrum.com_index);
    if (com.maxCoeff() - com.minCoeff() > 1e-8) {
      detail = "N=" + std::to_string(n) + " COM eigenvector spread too large";
      return false;
    }
  }
  if (rel_err(ctx.spectrum217.frequencies(0), ctx.spec.omega_z) > 1e-9) {
    detail = "N=217 top mode off omega_z by " +
             std::to_string(rel_err(ctx.spectrum217.frequencies(0), ctx.spec.omega_z));
    return false;
  }
  const auto com = ctx.spectrum217.eigenvectors.col(ctx.spectrum217.com_index);
  if (com.maxCoeff() - com.minCoeff() > 1e-8) {
    detail = "N=217 COM eigenvector spread too large";
    return false;
  }
  const double runtime = ctx.equilibrate_seconds + ctx.modes_seconds;
  std::ostringstream note;
  note << "N=217 pipeline " << runtime << " s";
  detail = note.str();
  return runtime < 10.0;
}

bool criterion_two_ion_oracle(Context& ctx, std::string& detail) {
  // frozen independent evaluation of the closed form at the reference point
  const double frozen = 372.14315816318733;  // rad/s
  const double at_quote =
      two_ion_closed_form(20e-6, ctx.spec, drive_odf(2.0 * kPi * 800e3));
  if (rel_err(at_quote, frozen) > 1e-6) {
    detail = "reference point off: got " + std::to_string(at_quote);
    return false;
  }

  SplitMix64 rng(8675309);
  const double lp = characteristic_lengths(ctx.spec).planar;
  int tested = 0, attempts = 0;
  double worst = 0.0;
  while (tested < 100 && attempts < 4000) {
    ++attempts;
    const double d = rng.uniform(0.8 * lp, 4.0 * lp);
    const double mu = rng.uniform(0.2, 3.0) * ctx.spec.omega_z;
    Crystal crystal;
    crystal.trap = ctx.spec;
    crystal.positions.resize(2, 2);
    crystal.positions << -d / 2, 0.0, d / 2, 0.0;
    double closed = 0.0;
    CouplingMatrix cm;
    try {
      closed = two_ion_closed_form(d, ctx.spec, drive_odf(mu));
      cm = coupling_matrix(crystal, mode_spectrum(crystal), drive_odf(mu));
    } catch (const Error&) {
      continue;  // resonant or unstable draw
    }
    worst = std::max(worst, rel_err(cm.j(0, 1), closed));
    ++tested;
  }
  std::ostringstream note;
  note << tested << " samples, worst rel err " << worst;
  detail = note.str();
  return tested == 100 && worst < 1e-12;
}

bool criterion_af_sign(Context& ctx, std::string& detail) {
  for (std::size_t g = 0; g < ctx.grid_couplings.size(); ++g) {
    double min_j = std::numeric_limits<double>::infinity();
    const Eigen::MatrixXd& j = ctx.grid_couplings[g].j;
    for (Eigen::Index i = 0; i < j.rows(); ++i) {
      for (Eigen::Index k = i + 1; k < j.cols(); ++k) min_j = std::min(min_j, j(i, k));
    }
    if (!(min_j > 0.0)) {
      detail = "non-positive coupling at grid point " + std::to_string(g);
      return false;
    }
  }
  detail = "all J_ij > 0 over 6 detunings";
  return true;
}

bool criterion_power_law(Context& ctx, std::string& detail) {
  const double t0 = now_seconds();
  double previous = -1.0;
  std::ostringstream note;
  note.precision(4);
  for (std::size_t g = 0; g < ctx.grid_couplings.size(); ++g) {
    const double a = ctx.grid_couplings[g].power_law_a;
    note << (g ? ", " : "a = ") << a;
    if (!(a >= 0.0 && a <= 3.2)) {
      detail = "exponent out of range at grid point " + std::to_string(g);
      return false;
    }
    if (!(a > previous)) {
      detail = "exponent not monotone at grid point " + std::to_string(g);
      return false;
    }
    previous = a;
  }

  // spatial uniformity close to the COM mode
  const Eigen::MatrixXd& j0 = ctx.grid_couplings[0].j;
  double sum = 0.0, sum_sq = 0.0;
  double count = 0.0;
  for (Eigen::Index i = 0; i < j0.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < j0.cols(); ++k) {
      sum += j0(i, k);
      sum_sq += j0(i, k) * j0(i, k);
      count += 1.0;
    }
  }
  const double mean = sum / count;
  const double cv = std::sqrt(sum_sq / count - mean * mean) / mean;
  if (!(cv < 0.05)) {
    detail = "coefficient of variation " + std::to_string(cv) + " at 0.5 kHz";
    return false;
  }
  if (!(ctx.grid_couplings[0].power_law_a < 0.1)) {
    detail = "a(0.5 kHz) = " + std::to_string(ctx.grid_couplings[0].power_law_a);
    return false;
  }

  // far-detuned limit: dipolar kernel
  const double mu = 20.0 * ctx.spec.omega_z;
  const CouplingMatrix far =
      coupling_matrix(ctx.crystal217, ctx.spectrum217, drive_odf(mu));
  if (std::abs(far.power_law_a - 3.0) > 0.15) {
    detail = "a(20 omega_z) = " + std::to_string(far.power_law_a);
    return false;
  }
  const double kq2 =
      ctx.constants.coulomb_constant * ctx.spec.ion_charge * ctx.spec.ion_charge;
  const double prefactor = drive_odf(mu).f0 * drive_odf(mu).f0 * 217.0 /
                           (2.0 * ctx.constants.reduced_planck * ctx.spec.ion_mass);
  const double mu4 = mu * mu * mu * mu;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < 217; ++i) {
    for (Eigen::Index k = i + 1; k < 217; ++k) {
      const double d =
          (ctx.crystal217.positions.row(i) - ctx.crystal217.positions.row(k)).norm();
      const double expected = prefactor * kq2 / (ctx.spec.ion_mass * d * d * d);
      worst = std::max(worst, rel_err(mu4 * far.j(i, k), expected));
    }
  }
  const double runtime = now_seconds() - t0;
  note << "; CV(0.5 kHz) = " << cv << "; a(20wz) = " << far.power_law_a
       << "; mu^4 worst rel err " << worst << "; " << runtime << " s";
  detail = note.str();
  return worst < 0.01 && runtime < 120.0;
}

bool criterion_static_bridge(Context& ctx, std::string& detail) {
  for (int n : {2, 3, 7}) {
    const Crystal crystal = find_equilibrium(seed_lattice(n, ctx.spec), ctx.spec);
    const ModeSpectrum spectrum = mode_spectrum(crystal);
    const OdfSpec odf = drive_odf(1e-3 * ctx.spec.omega_z);
    const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf);
    const Eigen::MatrixXd c = static_adiabatic_oracle(crystal, odf.f0);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double bridged = n * c(i, j) / (2.0 * ctx.constants.reduced_planck);
        if (rel_err(bridged, cm.j(i, j)) > 1e-4) {
          detail = "N=" + std::to_string(n) + " bridge off at pair " + std::to_string(i) +
                   "," + std::to_string(j);
          return false;
        }
      }
    }
  }

  // magnitude of the static-force pair formula, corrected for tilt softening
  const double d = 20e-6;
  const double f0 = 2e-23;
  Crystal crystal;
  crystal.trap = ctx.spec;
  crystal.positions.resize(2, 2);
  crystal.positions << -d / 2, 0.0, d / 2, 0.0;
  const Eigen::MatrixXd c = static_adiabatic_oracle(crystal, f0);
  const double kq2 =
      ctx.constants.coulomb_constant * ctx.spec.ion_charge * ctx.spec.ion_charge;
  const double stiffness = ctx.spec.ion_mass * ctx.spec.omega_z * ctx.spec.omega_z;
  const double simple = kq2 / (d * d * d) * f0 * f0 / (stiffness * stiffness);
  const double omega_t_sq = ctx.spec.omega_z * ctx.spec.omega_z -
                            2.0 * kq2 / (ctx.spec.ion_mass * d * d * d);
  const double corrected =
      simple * (ctx.spec.omega_z * ctx.spec.omega_z / omega_t_sq);
  if (rel_err(std::abs(c(0, 1)), corrected) > 1e-6) {
    detail = "pair-formula magnitude off by " +
             std::to_string(rel_err(std::abs(c(0, 1)), corrected));
    return false;
  }
  detail = "bridge holds for N in {2,3,7}; magnitude check 1e-6";
  return true;
}

bool criterion_crystal_scale(Context& ctx, std::string& detail) {
  const SpacingStats stats = nn_spacing_stats(ctx.crystal217);
  const double beta = rotating_frame_beta(ctx.spec);
  std::ostringstream note;
  note << "median nn " << stats.median * 1e6 << " um, beta " << beta << ", "
       << ctx.equilibrate_seconds << " s";
  detail = note.str();
  if (!(stats.median >= 12e-6 && stats.median <= 28e-6)) return false;
  if (!(std::abs(beta - 0.0377) <= 0.0005)) return false;
  return ctx.equilibrate_seconds < 60.0;
}

bool criterion_dynamics(Context& ctx, std::string& detail) {
  (void)ctx;
  SplitMix64 rng(424242);
  double worst_gap = 0.0;
  double worst_drift = 0.0;
  for (int n = 2; n <= 10; ++n) {
    CouplingMatrix cm;
    cm.j = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double value = rng.uniform(-400.0, 400.0);
        cm.j(i, j) = cm.j(j, i) = value;
      }
    }
    std::vector<double> times;
    for (int i = 0; i <= 50; ++i) times.push_back(i * 6e-5);
    const Eigen::MatrixXd closed = analytic_depolarization(cm, times, kPi / 2);
    const EvolveResult exact = exact_evolve(cm, 0.0, kPi / 2, times);
    worst_gap = std::max(worst_gap, (closed - exact.sx).cwiseAbs().maxCoeff());
    worst_drift = std::max(worst_drift, exact.max_norm_drift);
  }
  if (worst_gap > 1e-10) {
    detail = "closed form vs statevector gap " + std::to_string(worst_gap);
    return false;
  }
  if (worst_drift > 1e-12) {
    detail = "norm drift " + std::to_string(worst_drift);
    return false;
  }

  // mean-field rate against a finite-difference derivative of the exact state
  const int n = 6;
  CouplingMatrix cm;
  cm.j = Eigen::MatrixXd::Zero(n, n);
  SplitMix64 rng2(97531);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double value = rng2.uniform(50.0, 400.0);  // keep every B_j away from zero
      cm.j(i, j) = cm.j(j, i) = value;
    }
  }
  const double theta = kPi / 3;
  const Eigen::VectorXd field =
      mean_field_field(cm, Eigen::VectorXd::Constant(n, std::cos(theta)));
  const double h = 1e-4 / field.cwiseAbs().maxCoeff();
  const std::vector<double> times = {-h, h};
  const EvolveResult exact = exact_evolve(cm, 0.0, theta, times);
  double worst_rate = 0.0;
  for (int j = 0; j < n; ++j) {
    const double derivative = (exact.sy(1, j) - exact.sy(0, j)) / (2.0 * h);
    worst_rate = std::max(
        worst_rate, std::abs(derivative - field(j) * std::sin(theta)) /
                        std::abs(field(j) * std::sin(theta)));
  }
  std::ostringstream note;
  note << "gap " << worst_gap << ", drift " << worst_drift << ", rate err " << worst_rate;
  detail = note.str();
  return worst_rate < 0.005;
}

bool criterion_sanity_scales(Context& ctx, std::string& detail) {
  const PairEnergyScales scales = pair_energy_scales(10e-6, ctx.spec);
  if (rel_err(scales.magnetic_dipole, 8.6e-39) > 0.02) {
    detail = "dipole scale " + std::to_string(scales.magnetic_dipole);
    return false;
  }
  const OdfWavevector wavevector = odf_wavevector(drive_odf(2.0 * kPi * 800e3));
  if (rel_err(wavevector.lambda_r, 3.7e-6) > 0.03) {
    detail = "lambda_R " + std::to_string(wavevector.lambda_r);
    return false;
  }
  const double z0 =
      std::sqrt(ctx.constants.reduced_planck / (2.0 * ctx.spec.ion_mass * ctx.spec.omega_z));
  const double eta = wavevector.delta_k * z0;
  if (rel_err(eta, 0.045) > 0.05) {
    detail = "eta_COM " + std::to_string(eta);
    return false;
  }
  std::ostringstream note;
  note << "dipole " << scales.magnetic_dipole << " J, lambda_R " << wavevector.lambda_r
       << " m, eta " << eta;
  detail = note.str();
  return true;
}

bool criterion_determinism(Context& ctx, std::string& detail) {
  (void)ctx;
  const auto slurp = [](const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  };
  const fs::path base = fs::temp_directory_path();
  const fs::path dir_a = base / "iontrap_acceptance_sweep_a";
  const fs::path dir_b = base / "iontrap_acceptance_sweep_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  RunConfig config;  // stock defaults: N = 217 and the standard detuning grid
  std::ostringstream log;
  config.directory = dir_a.string();
  if (run_command("sweep", config, log, true) != kExitOk) {
    detail = "first sweep failed";
    return false;
  }
  config.directory = dir_b.string();
  if (run_command("sweep", config, log, true) != kExitOk) {
    detail = "second sweep failed";
    return false;
  }
  for (const char* name :
       {"crystal.csv", "modes.csv", "modes_eigenvectors.csv", "sweep.csv"}) {
    if (slurp(dir_a / name) != slurp(dir_b / name)) {
      detail = std::string(name) + " differs between runs";
      return false;
    }
  }
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  detail = "byte-identical tables across two sweep runs";
  return true;
}

}  // namespace

int main() {
  Context ctx;
  std::printf("building shared N = 217 pipeline...\n");
  ctx.build();
  std::printf("  equilibrate %.2f s (%d iterations), modes %.2f s\n\n",
              ctx.equilibrate_seconds, ctx.crystal217.iterations, ctx.modes_seconds);

  const std::vector<Criterion> criteria = {
      {"com-mode-theorem", criterion_com_mode},
      {"two-ion-oracle-equivalence", criterion_two_ion_oracle},
      {"antiferromagnetic-sign", criterion_af_sign},
      {"power-law-tunability", criterion_power_law},
      {"static-limit-bridge", criterion_static_bridge},
      {"crystal-scale", criterion_crystal_scale},
      {"dynamics-oracles", criterion_dynamics},
      {"sanity-scales", criterion_sanity_scales},
      {"determinism", criterion_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const double t0 = now_seconds();
    std::string detail;
    bool passed = false;
    try {
      passed = criteria[i].run(ctx, detail);
    } catch (const std::exception& error) {
      detail = error.what();
    }
    const double elapsed = now_seconds() - t0;
    std::printf("[%zu] %-28s %s (%.2f s%s%s)\n", i + 1, criteria[i].name.c_str(),
                passed ? "PASS" : "FAIL", elapsed, detail.empty() ? "" : "; ",
                detail.c_str());
    if (!passed) ++failures;
  }
  if (failures == 0) {
    std::printf("\nacceptance: all %zu criteria passed\n", criteria.size());
  } else {
    std::printf("\nacceptance: %d criterion(s) FAILED\n", failures);
  }
  return failures == 0 ? 0 : 1;
}
