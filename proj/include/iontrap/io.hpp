#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "iontrap/couplings.hpp"
#include "iontrap/crystal.hpp"
#include "iontrap/modes.hpp"
#include "iontrap/spin_dynamics.hpp"

namespace iontrap {

/// 17 significant digits, scientific; round-trips any double exactly.
std::string format_g17(double value);

/// Output tables. Column schemas are fixed; all floats use format_g17 so two
/// runs with identical inputs emit byte-identical files.
void write_crystal_csv(const std::filesystem::path& path, const Crystal& crystal);
void write_modes_csv(const std::filesystem::path& path, const ModeSpectrum& spectrum);
void write_eigenvectors_csv(const std::filesystem::path& path, const ModeSpectrum& spectrum);
void write_couplings_csv(const std::filesystem::path& path, const Crystal& crystal,
                         const CouplingMatrix& cm);
void write_sweep_csv(const std::filesystem::path& path, std::span<const SweepRow> rows,
                     double omega_com);
void write_dynamics_csv(const std::filesystem::path& path, const EvolveResult& result);
void write_precession_csv(const std::filesystem::path& path, std::span<const double> thetas,
                          std::span<const double> rates);

/// JSON variants of the same tables (output.format = json): an array of row
/// objects with the same field names as the CSV headers.
void write_crystal_json(const std::filesystem::path& path, const Crystal& crystal);
void write_modes_json(const std::filesystem::path& path, const ModeSpectrum& spectrum);
void write_eigenvectors_json(const std::filesystem::path& path, const ModeSpectrum& spectrum);
void write_couplings_json(const std::filesystem::path& path, const Crystal& crystal,
                          const CouplingMatrix& cm);
void write_sweep_json(const std::filesystem::path& path, std::span<const SweepRow> rows,
                      double omega_com);
void write_dynamics_json(const std::filesystem::path& path, const EvolveResult& result);
void write_precession_json(const std::filesystem::path& path, std::span<const double> thetas,
                           std::span<const double> rates);

}  // namespace iontrap
