#include "iontrap/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "iontrap/errors.hpp"

namespace iontrap {

namespace {

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << message;
  throw ConfigError(msg.str());
}

double parse_double(const std::string& origin, int line, const std::string& key,
                    const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail(origin, line, "key '" + key + "': cannot parse '" + value + "' as a number");
  }
  return out;
}

long long parse_integer(const std::string& origin, int line, const std::string& key,
                        const std::string& value) {
  long long out = 0;
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail(origin, line, "key '" + key + "': cannot parse '" + value + "' as an integer");
  }
  return out;
}

std::uint64_t parse_u64(const std::string& origin, int line, const std::string& key,
                        const std::string& value) {
  std::uint64_t out = 0;
  const char* begin = value.data();
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc{} || ptr != end) {
    fail(origin, line, "key '" + key + "': cannot parse '" + value + "' as an unsigned integer");
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& origin, int line,
                                      const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string item =
        trim(value.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (item.empty()) {
      fail(origin, line, "key '" + key + "': empty list element");
    }
    out.push_back(parse_double(origin, line, key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::istringstream stream(text);
  std::string raw;
  std::string section;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    const std::size_t comment = raw.find_first_of("#;");
    if (comment != std::string::npos) raw.erase(comment);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_number, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      static const char* kSections[] = {"species", "trap",  "crystal", "odf",
                                        "dynamics", "sweep", "output"};
      if (std::find_if(std::begin(kSections), std::end(kSections), [&](const char* s) {
            return section == s;
          }) == std::end(kSections)) {
        fail(origin, line_number, "unknown section '" + section + "'");
      }
      continue;
    }

    const std::size_t equals = line.find('=');
    if (equals == std::string::npos) {
      fail(origin, line_number, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, equals));
    const std::string value = trim(line.substr(equals + 1));
    if (key.empty()) fail(origin, line_number, "empty key");
    if (value.empty()) fail(origin, line_number, "key '" + key + "' has no value");
    if (section.empty()) {
      fail(origin, line_number, "key '" + key + "' appears before any [section]");
    }

    const std::string qualified = section + "." + key;
    if (qualified == "species.mass_u") {
      config.mass_u = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "species.charge_e") {
      config.charge_e = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "trap.b0_tesla") {
      config.b0_tesla = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "trap.f_z_hz") {
      config.f_z_hz = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "trap.f_r_hz") {
      config.f_r_hz = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "crystal.n_ions") {
      config.n_ions = static_cast<int>(parse_integer(origin, line_number, qualified, value));
    } else if (qualified == "crystal.tol") {
      config.tol = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "crystal.max_iter") {
      config.max_iter = static_cast<int>(parse_integer(origin, line_number, qualified, value));
    } else if (qualified == "crystal.jitter_seed") {
      config.jitter_seed = parse_u64(origin, line_number, qualified, value);
    } else if (qualified == "odf.f0_newton") {
      config.f0_newton = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "odf.f_mu_hz") {
      config.f_mu_hz = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "odf.theta_r_deg") {
      config.theta_r_deg = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "odf.wavelength_m") {
      config.wavelength_m = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "odf.temperature_k") {
      config.temperature_k = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "odf.guard_band_rel") {
      config.guard_band_rel = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "dynamics.theta_rad") {
      config.theta_rad = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "dynamics.b_transverse_hz") {
      config.b_transverse_hz = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "dynamics.t_start_s") {
      config.t_start_s = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "dynamics.t_stop_s") {
      config.t_stop_s = parse_double(origin, line_number, qualified, value);
    } else if (qualified == "dynamics.t_steps") {
      config.t_steps = static_cast<int>(parse_integer(origin, line_number, qualified, value));
    } else if (qualified == "sweep.detunings_hz") {
      config.detunings_hz = parse_double_list(origin, line_number, qualified, value);
    } else if (qualified == "output.directory") {
      config.directory = value;
    } else if (qualified == "output.format") {
      config.format = value;
    } else {
      fail(origin, line_number, "unknown key '" + qualified + "'");
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << file.rdbuf();
  return parse_config(buffer.str(), path);
}

void RunConfig::validate() const {
  const auto require = [](bool condition, const std::string& message) {
    if (!condition) throw ConfigError("config validation: " + message);
  };
  require(mass_u > 0, "species.mass_u must be positive");
  require(charge_e > 0, "species.charge_e must be positive");
  require(b0_tesla > 0, "trap.b0_tesla must be positive");
  require(f_z_hz > 0, "trap.f_z_hz must be positive");
  require(f_r_hz > 0,
          "trap.f_r_hz must be positive: beta = w_r (W_c - w_r)/w_z^2 - 1/2 needs w_r > 0 "
          "for in-plane confinement");
  require(n_ions >= 1, "crystal.n_ions must be >= 1");
  require(tol > 0, "crystal.tol must be positive");
  require(max_iter >= 1, "crystal.max_iter must be >= 1");
  require(f0_newton > 0, "odf.f0_newton must be positive");
  require(f_mu_hz > 0, "odf.f_mu_hz must be positive");
  require(theta_r_deg > 0 && theta_r_deg < 180, "odf.theta_r_deg must lie in (0, 180)");
  require(wavelength_m > 0, "odf.wavelength_m must be positive");
  require(temperature_k >= 0, "odf.temperature_k must be non-negative");
  require(guard_band_rel > 0, "odf.guard_band_rel must be positive");
  require(t_steps >= 1, "dynamics.t_steps must be >= 1");
  require(t_stop_s >= t_start_s, "dynamics.t_stop_s must be >= t_start_s");
  require(!detunings_hz.empty(), "sweep.detunings_hz must not be empty");
  require(!directory.empty(), "output.directory must not be empty");
  require(format == "csv" || format == "json", "output.format must be 'csv' or 'json'");
  // Cross-field check mirrored from TrapSpec: the mass left after removing
  // charge_e electrons must stay positive.
  const PhysicalConstants constants;
  require(mass_u * constants.atomic_mass_unit > charge_e * constants.electron_mass,
          "species.mass_u too small for charge_e electrons removed");
}

TrapSpec to_trap_spec(const RunConfig& config, const PhysicalConstants& constants) {
  TrapSpec spec;
  spec.ion_mass =
      config.mass_u * constants.atomic_mass_unit - config.charge_e * constants.electron_mass;
  spec.ion_charge = config.charge_e * constants.elementary_charge;
  spec.b_field = config.b0_tesla;
  spec.omega_z = 2.0 * std::numbers::pi * config.f_z_hz;
  spec.omega_r = 2.0 * std::numbers::pi * config.f_r_hz;
  return spec;
}

OdfSpec to_odf_spec(const RunConfig& config) {
  OdfSpec odf;
  odf.f0 = config.f0_newton;
  odf.mu_r = 2.0 * std::numbers::pi * config.f_mu_hz;
  odf.theta_r = config.theta_r_deg * std::numbers::pi / 180.0;
  odf.optical_wavelength = config.wavelength_m;
  odf.temperature = config.temperature_k;
  odf.guard_band_rel = config.guard_band_rel;
  return odf;
}

}  // namespace iontrap
