#include "iontrap/io.hpp"

#include <cstdio>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "iontrap/errors.hpp"

namespace iontrap {

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_for_write(path);
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

nlohmann::ordered_json sweep_row_json(const SweepRow& row, double omega_com) {
  nlohmann::ordered_json object;
  object["detuning_hz"] = row.detuning / (2.0 * std::numbers::pi);
  object["mu_r_rad_s"] = omega_com + row.detuning;
  object["jbar_rad_s"] = row.jbar;
  object["a_fit"] = row.power_law_a;
  object["fit_rms"] = row.fit_rms;
  object["ok"] = row.ok;
  if (!row.message.empty()) object["message"] = row.message;
  return object;
}

}  // namespace

std::string format_g17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.16e", value);
  return buffer;
}

void write_crystal_csv(const std::filesystem::path& path, const Crystal& crystal) {
  auto out = open_for_write(path);
  out << "ion_index,x_m,y_m\n";
  for (Eigen::Index i = 0; i < crystal.positions.rows(); ++i) {
    out << i << ',' << format_g17(crystal.positions(i, 0)) << ','
        << format_g17(crystal.positions(i, 1)) << '\n';
  }
}

void write_modes_csv(const std::filesystem::path& path, const ModeSpectrum& spectrum) {
  auto out = open_for_write(path);
  out << "mode_index,omega_rad_s\n";
  for (Eigen::Index m = 0; m < spectrum.frequencies.size(); ++m) {
    out << m << ',' << format_g17(spectrum.frequencies(m)) << '\n';
  }
}

void write_eigenvectors_csv(const std::filesystem::path& path, const ModeSpectrum& spectrum) {
  auto out = open_for_write(path);
  const Eigen::Index n = spectrum.eigenvectors.rows();
  for (Eigen::Index ion = 0; ion < n; ++ion) {
    for (Eigen::Index mode = 0; mode < n; ++mode) {
      if (mode > 0) out << ',';
      out << format_g17(spectrum.eigenvectors(ion, mode));
    }
    out << '\n';
  }
}

void write_couplings_csv(const std::filesystem::path& path, const Crystal& crystal,
                         const CouplingMatrix& cm) {
  auto out = open_for_write(path);
  out << "i,j,d_ij_m,J_ij_rad_s\n";
  const Eigen::Index n = cm.j.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
      out << i << ',' << j << ',' << format_g17(d) << ',' << format_g17(cm.j(i, j)) << '\n';
    }
  }
}

void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows,
                     double /*omega_com*/) {
  auto out = open_for_write(path);
  out << "detuning_hz,jbar_rad_s,a_fit,fit_rms\n";
  for (const SweepRow& row : rows) {
    out << format_g17(row.detuning / (2.0 * std::numbers::pi)) << ','
        << format_g17(row.jbar) << ',' << format_g17(row.power_law_a) << ','
        << format_g17(row.fit_rms) << '\n';
  }
}

void write_dynamics_csv(const std::filesystem::path& path, const EvolveResult& result) {
  auto out = open_for_write(path);
  out << "t_s,spin_index,sx,sy,sz\n";
  for (std::size_t t = 0; t < result.times.size(); ++t) {
    const Eigen::Index row = static_cast<Eigen::Index>(t);
    for (Eigen::Index j = 0; j < result.sx.cols(); ++j) {
      out << format_g17(result.times[t]) << ',' << j << ',' << format_g17(result.sx(row, j))
          << ',' << format_g17(result.sy(row, j)) << ',' << format_g17(result.sz(row, j))
          << '\n';
    }
  }
}

void write_precession_csv(const std::filesystem::path& path, std::span<const double> thetas,
                          std::span<const double> rates) {
  auto out = open_for_write(path);
  out << "theta_rad,rate_rad_s\n";
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    out << format_g17(thetas[i]) << ',' << format_g17(rates[i]) << '\n';
  }
}

void write_crystal_json(const std::filesystem::path& path, const Crystal& crystal) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < crystal.positions.rows(); ++i) {
    rows.push_back({{"ion_index", i},
                    {"x_m", crystal.positions(i, 0)},
                    {"y_m", crystal.positions(i, 1)}});
  }
  write_text(path, rows.dump(2) + "\n");
}

void write_modes_json(const std::filesystem::path& path, const ModeSpectrum& spectrum) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index m = 0; m < spectrum.frequencies.size(); ++m) {
    rows.push_back({{"mode_index", m}, {"omega_rad_s", spectrum.frequencies(m)}});
  }
  write_text(path, rows.dump(2) + "\n");
}

void write_eigenvectors_json(const std::filesystem::path& path, const ModeSpectrum& spectrum) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const Eigen::Index n = spectrum.eigenvectors.rows();
  for (Eigen::Index ion = 0; ion < n; ++ion) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index mode = 0; mode < n; ++mode) {
      row.push_back(spectrum.eigenvectors(ion, mode));
    }
    rows.push_back(std::move(row));
  }
  write_text(path, rows.dump(2) + "\n");
}

void write_couplings_json(const std::filesystem::path& path, const Crystal& crystal,
                          const CouplingMatrix& cm) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  const Eigen::Index n = cm.j.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (crystal.positions.row(i) - crystal.positions.row(j)).norm();
      rows.push_back(
          {{"i", i}, {"j", j}, {"d_ij_m", d}, {"J_ij_rad_s", cm.j(i, j)}});
    }
  }
  write_text(path, rows.dump(2) + "\n");
}

void write_sweep_json(const std::filesystem::path& path, std::span<const SweepRow> rows,
                      double omega_com) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const SweepRow& row : rows) array.push_back(sweep_row_json(row, omega_com));
  write_text(path, array.dump(2) + "\n");
}

void write_dynamics_json(const std::filesystem::path& path, const EvolveResult& result) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < result.times.size(); ++t) {
    const Eigen::Index row = static_cast<Eigen::Index>(t);
    for (Eigen::Index j = 0; j < result.sx.cols(); ++j) {
      rows.push_back({{"t_s", result.times[t]},
                      {"spin_index", j},
                      {"sx", result.sx(row, j)},
                      {"sy", result.sy(row, j)},
                      {"sz", result.sz(row, j)}});
    }
  }
  write_text(path, rows.dump(2) + "\n");
}

void write_precession_json(const std::filesystem::path& path, std::span<const double> thetas,
                           std::span<const double> rates) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    rows.push_back({{"theta_rad", thetas[i]}, {"rate_rad_s", rates[i]}});
  }
  write_text(path, rows.dump(2) + "\n");
}

}  // namespace iontrap
