#include "iontrap/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "iontrap/errors.hpp"

namespace iontrap {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void require_non_resonant(double mu_r, const Eigen::VectorXd& frequencies, double omega_z,
                          double guard_band_rel) {
  const double guard = guard_band_rel * omega_z;
  for (Eigen::Index m = 0; m < frequencies.size(); ++m) {
    if (std::abs(mu_r - frequencies(m)) <= guard) {
      std::ostringstream msg;
      msg << "beatnote mu_r = " << mu_r << " rad/s within " << guard
          << " rad/s of mode " << m << " at " << frequencies(m)
          << " rad/s; driven response diverges";
      throw ResonanceError(msg.str());
    }
  }
}

}  // namespace

void OdfSpec::validate() const {
  if (!(f0 > 0.0)) throw std::invalid_argument("OdfSpec: f0 must be positive");
  if (!(mu_r > 0.0)) throw std::invalid_argument("OdfSpec: mu_r must be positive");
  if (!(theta_r > 0.0 && theta_r < std::numbers::pi)) {
    throw std::invalid_argument("OdfSpec: theta_r must lie in (0, pi)");
  }
  if (!(optical_wavelength > 0.0)) {
    throw std::invalid_argument("OdfSpec: optical_wavelength must be positive");
  }
  if (!(guard_band_rel > 0.0)) {
    throw std::invalid_argument("OdfSpec: guard_band_rel must be positive");
  }
}

OdfWavevector odf_wavevector(const OdfSpec& odf) {
  const double delta_k =
      2.0 * (2.0 * std::numbers::pi / odf.optical_wavelength) * std::sin(0.5 * odf.theta_r);
  return {delta_k, 2.0 * std::numbers::pi / delta_k};
}

LambDickeReport lamb_dicke_check(const ModeSpectrum& spectrum, const OdfSpec& odf,
                                 const TrapSpec& spec, const PhysicalConstants& constants) {
  const double delta_k = odf_wavevector(odf).delta_k;
  LambDickeReport report;
  report.threshold = odf.lamb_dicke_threshold;
  report.pass = true;
  report.modes.reserve(static_cast<std::size_t>(spectrum.frequencies.size()));
  for (Eigen::Index m = 0; m < spectrum.frequencies.size(); ++m) {
    const double omega = spectrum.frequencies(m);
    const double z0 = std::sqrt(constants.reduced_planck / (2.0 * spec.ion_mass * omega));
    double occupation = 1.0;  // 2 nbar + 1
    if (odf.temperature > 0.0) {
      occupation = 1.0 / std::tanh(constants.reduced_planck * omega /
                                   (2.0 * constants.boltzmann * odf.temperature));
    }
    const double rms = z0 * std::sqrt(occupation);
    const double eta = delta_k * rms;
    const bool pass = eta < odf.lamb_dicke_threshold;
    report.modes.push_back({omega, z0, rms, eta, pass});
    report.pass = report.pass && pass;
  }
  return report;
}

CouplingMatrix coupling_matrix(const Crystal& crystal, const ModeSpectrum& spectrum,
                               const OdfSpec& odf, const PhysicalConstants& constants) {
  odf.validate();
  const Eigen::Index n = spectrum.frequencies.size();
  require_non_resonant(odf.mu_r, spectrum.frequencies, crystal.trap.omega_z,
                       odf.guard_band_rel);

  const double prefactor = odf.f0 * odf.f0 * static_cast<double>(n) /
                           (2.0 * constants.reduced_planck * crystal.trap.ion_mass);
  Eigen::VectorXd denominators(n);
  for (Eigen::Index m = 0; m < n; ++m) {
    denominators(m) = 1.0 / (odf.mu_r * odf.mu_r - spectrum.frequencies(m) * spectrum.frequencies(m));
  }

  CouplingMatrix cm;
  cm.mu_r = odf.mu_r;
  cm.j.noalias() =
      prefactor * (spectrum.eigenvectors * denominators.asDiagonal() *
                   spectrum.eigenvectors.transpose());
  // Exact symmetry and zero diagonal by construction.
  for (Eigen::Index i = 0; i < n; ++i) {
    cm.j(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) cm.j(j, i) = cm.j(i, j);
  }
  cm.jbar = mean_coupling(cm);
  cm.power_law_a = kNan;
  cm.fit_rms = kNan;
  if (n >= 3) {
    try {
      const PowerLawFit fit = fit_power_law(cm, crystal);
      cm.power_law_a = fit.a;
      cm.fit_rms = fit.fit_rms;
    } catch (const DegenerateFitError&) {
      // leave NaN: couplings are valid, only the range fit is undefined
    }
  }
  return cm;
}

double two_ion_closed_form(double separation, const TrapSpec& spec, const OdfSpec& odf,
                           const PhysicalConstants& constants) {
  if (!(separation > 0.0)) {
    throw std::invalid_argument("two_ion_closed_form: separation must be positive");
  }
  odf.validate();
  const double kq2 = constants.coulomb_constant * spec.ion_charge * spec.ion_charge;
  const double omega_z_sq = spec.omega_z * spec.omega_z;
  const double omega_t_sq =
      omega_z_sq - 2.0 * kq2 / (spec.ion_mass * separation * separation * separation);
  if (omega_t_sq <= 0.0) {
    throw UnstablePlanarCrystalError(
        "two_ion_closed_form: tilt mode unstable at this separation");
  }
  Eigen::VectorXd frequencies(2);
  frequencies << spec.omega_z, std::sqrt(omega_t_sq);
  require_non_resonant(odf.mu_r, frequencies, spec.omega_z, odf.guard_band_rel);
  const double mu_sq = odf.mu_r * odf.mu_r;
  return odf.f0 * odf.f0 / (2.0 * constants.reduced_planck * spec.ion_mass) *
         (1.0 / (mu_sq - omega_z_sq) - 1.0 / (mu_sq - omega_t_sq));
}

Eigen::MatrixXd static_adiabatic_oracle(const Crystal& crystal, double f0,
                                        const PhysicalConstants& constants) {
  if (!(f0 > 0.0)) {
    throw std::invalid_argument("static_adiabatic_oracle: f0 must be positive");
  }
  const Eigen::MatrixXd k = stiffness_matrix(crystal, constants);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
  if (solver.info() != Eigen::Success) {
    throw Error("static_adiabatic_oracle: eigendecomposition failed");
  }
  if (solver.eigenvalues()(0) <= 0.0) {
    throw UnstablePlanarCrystalError(
        "static_adiabatic_oracle: stiffness matrix not positive definite");
  }
  const Eigen::MatrixXd k_inverse = solver.eigenvectors() *
                                    solver.eigenvalues().cwiseInverse().asDiagonal() *
                                    solver.eigenvectors().transpose();
  Eigen::MatrixXd c = -f0 * f0 * k_inverse;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < c.cols(); ++j) c(j, i) = c(i, j);
  }
  return c;
}

double mean_coupling(const CouplingMatrix& cm) {
  const Eigen::Index n = cm.j.rows();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) sum += cm.j(i, j);
    }
  }
  return sum / (static_cast<double>(n) * static_cast<double>(n));
}

PowerLawFit fit_power_law(const CouplingMatrix& cm, const Crystal& crystal) {
  const Eigen::Index n = cm.j.rows();
  if (n < 3) throw DegenerateFitError("fit_power_law: need at least 3 ions");
  if (crystal.positions.rows() != n) {
    throw std::invalid_argument("fit_power_law: crystal size does not match couplings");
  }

  std::vector<double> log_d;
  std::vector<double> log_j;
  log_d.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double magnitude = std::abs(cm.j(i, j));
      if (magnitude == 0.0) continue;
      const double d = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
      log_d.push_back(std::log(d));
      log_j.push_back(std::log(magnitude));
    }
  }

  // Distances from a converged equilibrium agree only to the solver
  // tolerance; differences below 1e-9 relative count as the same distance.
  std::vector<double> sorted = log_d;
  std::sort(sorted.begin(), sorted.end());
  int distinct = sorted.empty() ? 0 : 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] > 1e-9) ++distinct;
  }
  if (distinct < 2) {
    throw DegenerateFitError("fit_power_law: fewer than two distinct pair distances");
  }

  const double count = static_cast<double>(log_d.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < log_d.size(); ++i) {
    mean_x += log_d[i];
    mean_y += log_j[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < log_d.size(); ++i) {
    sxx += (log_d[i] - mean_x) * (log_d[i] - mean_x);
    sxy += (log_d[i] - mean_x) * (log_j[i] - mean_y);
  }
  const double slope = sxy / sxx;
  const double intercept = mean_y - slope * mean_x;
  double rss = 0.0;
  for (std::size_t i = 0; i < log_d.size(); ++i) {
    const double r = log_j[i] - (intercept + slope * log_d[i]);
    rss += r * r;
  }
  return {-slope, std::sqrt(rss / count)};
}

std::vector<SweepRow> detuning_sweep(const Crystal& crystal, const ModeSpectrum& spectrum,
                                     const OdfSpec& base, std::span<const double> detunings,
                                     const PhysicalConstants& constants) {
  const double omega_com = spectrum.frequencies(0);
  std::vector<SweepRow> rows;
  rows.reserve(detunings.size());
  for (double detuning : detunings) {
    SweepRow row;
    row.detuning = detuning;
    OdfSpec odf = base;
    odf.mu_r = omega_com + detuning;
    try {
      const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf, constants);
      row.jbar = cm.jbar;
      row.power_law_a = cm.power_law_a;
      row.fit_rms = cm.fit_rms;
      row.ok = true;
    } catch (const Error& error) {
      row.jbar = kNan;
      row.power_law_a = kNan;
      row.fit_rms = kNan;
      row.ok = false;
      row.message = error.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace iontrap
