#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

#include "iontrap/config.hpp"
#include "iontrap/errors.hpp"
#include "iontrap/io.hpp"

using namespace iontrap;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("empty text yields the full default configuration") {
  const RunConfig config = parse_config("");
  CHECK(config.mass_u == 9.0121831);
  CHECK(config.charge_e == 1.0);
  CHECK(config.b0_tesla == 4.46);
  CHECK(config.f_z_hz == 795e3);
  CHECK(config.f_r_hz == 45e3);
  CHECK(config.n_ions == 217);
  CHECK(config.f0_newton == 2e-23);
  CHECK(config.theta_r_deg == 4.8);
  CHECK(config.wavelength_m == 313e-9);
  CHECK(config.temperature_k == 1e-3);
  CHECK(config.detunings_hz.size() == 6);
  CHECK(config.format == "csv");
}

TEST_CASE("sections and keys parse with comments and whitespace") {
  const std::string text = R"(
# full pipeline example
[trap]
b0_tesla = 2.0   ; inline comment
f_z_hz = 1.2e6

[crystal]
n_ions = 19
jitter_seed = 998877

[sweep]
detunings_hz = 500, 1e3, 2.5e3
)";
  const RunConfig config = parse_config(text);
  CHECK(config.b0_tesla == 2.0);
  CHECK(config.f_z_hz == 1.2e6);
  CHECK(config.n_ions == 19);
  CHECK(config.jitter_seed == 998877);
  REQUIRE(config.detunings_hz.size() == 3);
  CHECK(config.detunings_hz[1] == 1e3);
  // untouched keys keep their defaults
  CHECK(config.f_r_hz == 45e3);
}

TEST_CASE("unknown keys and sections are hard errors with line context") {
  CHECK_THROWS_WITH_AS(parse_config("[trap]\nb_tesla = 4\n", "bad.ini"),
                       doctest::Contains("bad.ini:2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[magnet]\n", "bad.ini"),
                       doctest::Contains("unknown section"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("stray = 1\n"), doctest::Contains("before any"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[trap]\nb0_tesla\n"), doctest::Contains("key = value"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("[trap]\nb0_tesla = abc\n"),
                       doctest::Contains("cannot parse"), ConfigError);
}

TEST_CASE("zero rotation frequency fails validation citing the beta formula") {
  CHECK_THROWS_WITH_AS(parse_config("[trap]\nf_r_hz = 0\n"), doctest::Contains("beta"),
                       ConfigError);
}

TEST_CASE("remaining validation rules") {
  CHECK_THROWS_AS(parse_config("[crystal]\nn_ions = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[dynamics]\nt_steps = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[output]\nformat = xml\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[odf]\ntheta_r_deg = 200\n"), ConfigError);
  CHECK_NOTHROW(parse_config("[odf]\ntemperature_k = 0\n"));
}

TEST_CASE("duplicate keys: last value wins") {
  const RunConfig config = parse_config("[trap]\nb0_tesla = 1\nb0_tesla = 3\n");
  CHECK(config.b0_tesla == 3.0);
}

TEST_CASE("unit conversion into the angular-frequency domain") {
  const PhysicalConstants constants;
  const RunConfig config = parse_config("");
  const TrapSpec spec = to_trap_spec(config);
  CHECK(spec.omega_z == 2.0 * kPi * 795e3);
  CHECK(spec.omega_r == 2.0 * kPi * 45e3);
  CHECK(spec.ion_charge == constants.elementary_charge);
  CHECK(std::abs(spec.ion_mass - constants.beryllium9_ion_mass()) <
        1e-12 * spec.ion_mass);

  const OdfSpec odf = to_odf_spec(config);
  CHECK(odf.mu_r == 2.0 * kPi * 796e3);
  CHECK(std::abs(odf.theta_r - 4.8 * kPi / 180.0) < 1e-15);
}

TEST_CASE("missing config file is a config error") {
  CHECK_THROWS_AS(load_config("/nonexistent/penningsim.ini"), ConfigError);
}

TEST_CASE("g17 formatting round-trips doubles exactly") {
  for (double value : {0.0, 1.0, -372.14315816318733, 2.8838469404271704e-14,
                       9.786151511871039e-35, 6.02e23, -1.7976931348623157e308}) {
    const std::string text = format_g17(value);
    CHECK(std::strtod(text.c_str(), nullptr) == value);
  }
}
