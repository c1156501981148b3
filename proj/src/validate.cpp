#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "iontrap/couplings.hpp"
#include "iontrap/crystal.hpp"
#include "iontrap/errors.hpp"
#include "iontrap/modes.hpp"
#include "iontrap/pipeline.hpp"
#include "iontrap/random.hpp"
#include "iontrap/spin_dynamics.hpp"

namespace iontrap {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  std::string name;
  std::function<bool(std::string&)> run;
};

double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

Crystal quick_crystal(int n, const TrapSpec& spec) {
  EquilibrationOptions options;
  options.max_iterations = 100000;
  // deep convergence so closed-form comparisons at 1e-8 are meaningful
  options.tolerance = 1e-11 * spec.ion_mass * spec.omega_z * spec.omega_z *
                      rotating_frame_beta(spec) * characteristic_lengths(spec).planar;
  return find_equilibrium(seed_lattice(n, spec), spec, options);
}

// Random symmetric coupling matrix for the dynamics checks, rad/s.
CouplingMatrix random_couplings(int n, SplitMix64& rng) {
  CouplingMatrix cm;
  cm.j = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double value = rng.uniform(-300.0, 300.0);
      cm.j(i, j) = value;
      cm.j(j, i) = value;
    }
  }
  cm.jbar = mean_coupling(cm);
  return cm;
}

std::vector<Check> build_checks() {
  std::vector<Check> checks;
  const TrapSpec trap = TrapSpec::beryllium_default();
  const PhysicalConstants constants;

  checks.push_back({"constants-consistency", [=](std::string&) {
    constants.validate();
    return true;
  }});

  checks.push_back({"beta-two-routes", [=](std::string& detail) {
    const double omega_c = cyclotron_frequency(trap);
    const double direct = rotating_frame_beta(trap);
    const double rederived =
        trap.omega_r * (omega_c - trap.omega_r) / (trap.omega_z * trap.omega_z) - 0.5;
    detail = "rel diff " + std::to_string(rel_err(direct, rederived));
    return rel_err(direct, rederived) < 1e-14;
  }});

  checks.push_back({"cyclotron-scaling", [=](std::string&) {
    for (double factor : {0.5, 2.0, 3.0}) {
      TrapSpec scaled = trap;
      scaled.b_field *= factor;
      if (rel_err(cyclotron_frequency(scaled), factor * cyclotron_frequency(trap)) > 1e-14)
        return false;
      scaled = trap;
      scaled.ion_charge *= factor;
      if (rel_err(cyclotron_frequency(scaled), factor * cyclotron_frequency(trap)) > 1e-14)
        return false;
      scaled = trap;
      scaled.ion_mass *= factor;
      if (rel_err(cyclotron_frequency(scaled), cyclotron_frequency(trap) / factor) > 1e-14)
        return false;
    }
    return true;
  }});

  checks.push_back({"pair-energy-power-laws", [=](std::string&) {
    const auto at = [&](double d) { return pair_energy_scales(d, trap); };
    const double ratio = 3.7;
    const PairEnergyScales a = at(10e-6);
    const PairEnergyScales b = at(10e-6 * ratio);
    const double coulomb_exp = std::log(b.coulomb / a.coulomb) / std::log(ratio);
    const double dipole_exp = std::log(b.magnetic_dipole / a.magnetic_dipole) / std::log(ratio);
    return std::abs(coulomb_exp + 1.0) < 1e-12 && std::abs(dipole_exp + 3.0) < 1e-12;
  }});

  checks.push_back({"two-ion-separation", [=](std::string& detail) {
    const Crystal crystal = quick_crystal(2, trap);
    const double beta = rotating_frame_beta(trap);
    const double kq2 = constants.coulomb_constant * trap.ion_charge * trap.ion_charge;
    const double expected = std::cbrt(
        2.0 * kq2 / (trap.ion_mass * beta * trap.omega_z * trap.omega_z));
    const double got = (crystal.positions.row(0) - crystal.positions.row(1)).norm();
    detail = "rel err " + std::to_string(rel_err(got, expected));
    return rel_err(got, expected) < 1e-8;
  }});

  checks.push_back({"three-ion-circumradius", [=](std::string& detail) {
    const Crystal crystal = quick_crystal(3, trap);
    const double beta = rotating_frame_beta(trap);
    const double kq2 = constants.coulomb_constant * trap.ion_charge * trap.ion_charge;
    const double expected = std::cbrt(
        kq2 / (std::sqrt(3.0) * trap.ion_mass * beta * trap.omega_z * trap.omega_z));
    Eigen::RowVector2d centroid = crystal.positions.colwise().mean();
    for (int i = 0; i < 3; ++i) {
      const double radius = (crystal.positions.row(i) - centroid).norm();
      if (rel_err(radius, expected) > 1e-8) {
        detail = "ion " + std::to_string(i) + " rel err " +
                 std::to_string(rel_err(radius, expected));
        return false;
      }
    }
    return true;
  }});

  checks.push_back({"gradient-vs-finite-differences", [=](std::string& detail) {
    SplitMix64 rng(314159);
    const double lp = characteristic_lengths(trap).planar;
    const double h = 1e-6 * lp;
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 6;
      PositionMatrix positions(n, 2);
      for (int i = 0; i < n; ++i) {
        positions(i, 0) = rng.uniform(-2.0 * lp, 2.0 * lp);
        positions(i, 1) = rng.uniform(-2.0 * lp, 2.0 * lp);
      }
      const PositionMatrix gradient = potential_gradient(positions, trap);
      const double scale = gradient.cwiseAbs().maxCoeff();
      for (int i = 0; i < n; ++i) {
        for (int axis = 0; axis < 2; ++axis) {
          PositionMatrix plus = positions, minus = positions;
          plus(i, axis) += h;
          minus(i, axis) -= h;
          const double fd =
              (potential_energy(plus, trap) - potential_energy(minus, trap)) / (2.0 * h);
          if (std::abs(fd - gradient(i, axis)) > 1e-6 * scale) {
            detail = "mismatch at trial " + std::to_string(trial);
            return false;
          }
        }
      }
    }
    return true;
  }});

  checks.push_back({"energy-rotation-invariance", [=](std::string& detail) {
    const Crystal crystal = quick_crystal(7, trap);
    const double reference = potential_energy(crystal.positions, trap);
    for (double angle : {0.3, 1.2, 2.9}) {
      Eigen::Matrix2d rotation;
      rotation << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
      const PositionMatrix rotated = crystal.positions * rotation.transpose();
      if (rel_err(potential_energy(rotated, trap), reference) > 1e-12) {
        detail = "angle " + std::to_string(angle);
        return false;
      }
    }
    return true;
  }});

  checks.push_back({"com-mode-theorem", [=](std::string& detail) {
    for (int n : {2, 7, 19}) {
      const Crystal crystal = quick_crystal(n, trap);
      const ModeSpectrum spectrum = mode_spectrum(crystal);
      if (rel_err(spectrum.frequencies(0), trap.omega_z) > 1e-9) {
        detail = "N=" + std::to_string(n) + " top mode off omega_z";
        return false;
      }
      const auto com = spectrum.eigenvectors.col(spectrum.com_index);
      if (com.maxCoeff() - com.minCoeff() > 1e-8) {
        detail = "N=" + std::to_string(n) + " COM eigenvector not uniform";
        return false;
      }
      const Eigen::MatrixXd gram =
          spectrum.eigenvectors.transpose() * spectrum.eigenvectors -
          Eigen::MatrixXd::Identity(n, n);
      if (gram.cwiseAbs().maxCoeff() > 1e-10) {
        detail = "N=" + std::to_string(n) + " eigenvectors not orthonormal";
        return false;
      }
      const Eigen::MatrixXd k = stiffness_matrix(crystal);
      for (int m = 0; m < n; ++m) {
        const double lambda =
            crystal.trap.ion_mass * spectrum.frequencies(m) * spectrum.frequencies(m);
        const double residual =
            (k * spectrum.eigenvectors.col(m) - lambda * spectrum.eigenvectors.col(m))
                .norm();
        if (residual > 1e-8 * crystal.trap.ion_mass * trap.omega_z * trap.omega_z) {
          detail = "N=" + std::to_string(n) + " eigen residual too large";
          return false;
        }
      }
    }
    return true;
  }});

  checks.push_back({"two-ion-oracle", [=](std::string& detail) {
    SplitMix64 rng(271828);
    const double lp = characteristic_lengths(trap).planar;
    int tested = 0;
    while (tested < 20) {
      const double d = rng.uniform(0.8 * lp, 4.0 * lp);
      const double mu = rng.uniform(0.2, 3.0) * trap.omega_z;
      OdfSpec odf;
      odf.mu_r = mu;
      odf.theta_r = 4.8 * kPi / 180.0;
      Crystal crystal;
      crystal.trap = trap;
      crystal.positions.resize(2, 2);
      crystal.positions << -d / 2, 0.0, d / 2, 0.0;
      double closed = 0.0;
      try {
        closed = two_ion_closed_form(d, trap, odf);
      } catch (const Error&) {
        continue;  // resonant or unstable draw; redraw
      }
      const ModeSpectrum spectrum = mode_spectrum(crystal);
      const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf);
      if (rel_err(cm.j(0, 1), closed) > 1e-12) {
        detail = "d=" + std::to_string(d) + " mu=" + std::to_string(mu);
        return false;
      }
      ++tested;
    }
    return true;
  }});

  checks.push_back({"static-limit-bridge", [=](std::string& detail) {
    for (int n : {2, 3}) {
      const Crystal crystal = quick_crystal(n, trap);
      const ModeSpectrum spectrum = mode_spectrum(crystal);
      OdfSpec odf;
      odf.mu_r = 1e-3 * trap.omega_z;
      odf.theta_r = 4.8 * kPi / 180.0;
      const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf);
      const Eigen::MatrixXd c = static_adiabatic_oracle(crystal, odf.f0);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
          const double bridged =
              static_cast<double>(n) * c(i, j) / (2.0 * constants.reduced_planck);
          if (rel_err(bridged, cm.j(i, j)) > 1e-4) {
            detail = "N=" + std::to_string(n);
            return false;
          }
        }
      }
    }
    return true;
  }});

  checks.push_back({"large-mu-asymptote", [=](std::string& detail) {
    const Crystal crystal = quick_crystal(7, trap);
    const ModeSpectrum spectrum = mode_spectrum(crystal);
    OdfSpec odf;
    odf.mu_r = 20.0 * trap.omega_z;
    odf.theta_r = 4.8 * kPi / 180.0;
    const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf);
    const double kq2 = constants.coulomb_constant * trap.ion_charge * trap.ion_charge;
    const double mu4 = std::pow(odf.mu_r, 4);
    const double prefactor =
        odf.f0 * odf.f0 * 7.0 / (2.0 * constants.reduced_planck * trap.ion_mass);
    for (int i = 0; i < 7; ++i) {
      for (int j = i + 1; j < 7; ++j) {
        const double d = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
        const double expected = prefactor * kq2 / (trap.ion_mass * d * d * d);
        if (rel_err(mu4 * cm.j(i, j), expected) > 0.01) {
          detail = "pair " + std::to_string(i) + "," + std::to_string(j);
          return false;
        }
      }
    }
    return true;
  }});

  checks.push_back({"sign-theorem-above-band", [=](std::string& detail) {
    const Crystal crystal = quick_crystal(7, trap);
    const ModeSpectrum spectrum = mode_spectrum(crystal);
    for (double detuning_hz : {500.0, 5e3, 5e4, 5e5}) {
      OdfSpec odf;
      odf.mu_r = spectrum.frequencies(0) + 2.0 * kPi * detuning_hz;
      odf.theta_r = 4.8 * kPi / 180.0;
      const CouplingMatrix cm = coupling_matrix(crystal, spectrum, odf);
      for (int i = 0; i < 7; ++i) {
        for (int j = i + 1; j < 7; ++j) {
          if (!(cm.j(i, j) > 0.0)) {
            detail = "detuning " + std::to_string(detuning_hz) + " Hz";
            return false;
          }
        }
      }
    }
    return true;
  }});

  checks.push_back({"depolarization-vs-exact", [=](std::string& detail) {
    SplitMix64 rng(141421);
    for (int n : {2, 5, 8}) {
      const CouplingMatrix cm = random_couplings(n, rng);
      std::vector<double> times;
      for (int i = 0; i <= 20; ++i) times.push_back(i * 1e-4);
      const Eigen::MatrixXd closed = analytic_depolarization(cm, times, kPi / 2);
      const EvolveResult exact = exact_evolve(cm, 0.0, kPi / 2, times);
      if ((closed - exact.sx).cwiseAbs().maxCoeff() > 1e-10) {
        detail = "N=" + std::to_string(n) + " sx mismatch";
        return false;
      }
      if (exact.max_norm_drift > 1e-12) {
        detail = "N=" + std::to_string(n) + " norm drift";
        return false;
      }
      if (exact.sz.cwiseAbs().maxCoeff() > 1e-12) {
        detail = "N=" + std::to_string(n) + " sigma^z not conserved";
        return false;
      }
    }
    return true;
  }});

  checks.push_back({"rabi-limit", [=](std::string& detail) {
    CouplingMatrix cm;
    cm.j = Eigen::MatrixXd::Zero(3, 3);
    const double b = 2.0 * kPi * 1e3;
    std::vector<double> times = {0.0, 1e-4, 2.5e-4, 7e-4};
    const EvolveResult exact = exact_evolve(cm, b, 0.0, times);
    for (std::size_t t = 0; t < times.size(); ++t) {
      for (int j = 0; j < 3; ++j) {
        if (std::abs(exact.sz(static_cast<Eigen::Index>(t), j) - std::cos(b * times[t])) >
            1e-9) {
          detail = "t=" + std::to_string(times[t]);
          return false;
        }
      }
    }
    return true;
  }});

  checks.push_back({"mean-field-derivative", [=](std::string& detail) {
    SplitMix64 rng(173205);
    const int n = 6;
    const CouplingMatrix cm = random_couplings(n, rng);
    const double theta = kPi / 3;
    const Eigen::VectorXd field =
        mean_field_field(cm, Eigen::VectorXd::Constant(n, std::cos(theta)));
    const double h = 1e-4 / field.cwiseAbs().maxCoeff();
    const std::vector<double> times = {-h, h};
    const EvolveResult exact = exact_evolve(cm, 0.0, theta, times);
    const double sx0 = std::sin(theta);
    for (int j = 0; j < n; ++j) {
      const double derivative = (exact.sy(1, j) - exact.sy(0, j)) / (2.0 * h);
      if (std::abs(derivative - field(j) * sx0) > 0.005 * std::abs(field(j) * sx0)) {
        detail = "spin " + std::to_string(j);
        return false;
      }
    }
    return true;
  }});

  checks.push_back({"precession-linearity", [=](std::string& detail) {
    SplitMix64 rng(223607);
    const CouplingMatrix cm = random_couplings(5, rng);
    const std::vector<double> thetas = {kPi / 6, kPi / 4, kPi / 3};
    const std::vector<double> rates = excess_precession_curve(cm, thetas);
    const double reference = rates[0] / std::cos(thetas[0]);
    for (std::size_t i = 1; i < thetas.size(); ++i) {
      if (rel_err(rates[i] / std::cos(thetas[i]), reference) > 1e-12) {
        detail = "theta index " + std::to_string(i);
        return false;
      }
    }
    const std::vector<double> equator = {kPi / 2};
    if (std::abs(excess_precession_curve(cm, equator)[0]) > 1e-12 * std::abs(reference)) {
      detail = "nonzero rate at theta = pi/2";
      return false;
    }
    return true;
  }});

  checks.push_back({"sweep-determinism", [=](std::string& detail) {
    const Crystal crystal = quick_crystal(7, trap);
    const ModeSpectrum spectrum = mode_spectrum(crystal);
    OdfSpec odf;
    odf.theta_r = 4.8 * kPi / 180.0;
    odf.mu_r = spectrum.frequencies(0) + 1.0;  // validated field; sweep overrides
    const std::vector<double> detunings = {2.0 * kPi * 500.0, 2.0 * kPi * 5e3};
    const auto first = detuning_sweep(crystal, spectrum, odf, detunings);
    const auto second = detuning_sweep(crystal, spectrum, odf, detunings);
    for (std::size_t i = 0; i < first.size(); ++i) {
      if (first[i].jbar != second[i].jbar || first[i].power_law_a != second[i].power_law_a) {
        detail = "row " + std::to_string(i);
        return false;
      }
    }
    return true;
  }});

  return checks;
}

}  // namespace

int run_validation_suite(std::ostream& log) {
  int failures = 0;
  for (const Check& check : build_checks()) {
    std::string detail;
    bool passed = false;
    try {
      passed = check.run(detail);
    } catch (const std::exception& error) {
      detail = error.what();
    }
    if (passed) {
      log << "ok   " << check.name << "\n";
    } else {
      ++failures;
      log << "FAIL " << check.name;
      if (!detail.empty()) log << " (" << detail << ")";
      log << "\n";
    }
  }
  log << (failures == 0 ? "validate: all checks passed\n"
                        : "validate: " + std::to_string(failures) + " check(s) failed\n");
  return failures;
}

}  // namespace iontrap
