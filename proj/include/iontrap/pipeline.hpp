#pragma once

#include <iosfwd>
#include <string>

#include "iontrap/config.hpp"

namespace iontrap {

/// Exit codes of the batch commands, one per failure class.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,  ///< `validate` found failing checks
  kExitConfig = 2,            ///< bad configuration or unusable request
  kExitPhysics = 3,           ///< resonance, confinement or stability refusal
  kExitNonConvergence = 4,
  kExitInternal = 5,
};

/// Runs one batch command: equilibrate | modes | couplings | sweep |
/// dynamics | validate. Later stages run the earlier ones and every stage
/// that ran has its tables written under config.directory, along with
/// summary.json. Progress goes to `log` unless quiet. Returns an ExitCode
/// and never throws.
int run_command(const std::string& command, const RunConfig& config, std::ostream& log,
                bool quiet = false);

/// The invariant suite behind the `validate` command: closed-form oracles,
/// property checks, and cross-module consistency at small N. Prints one line
/// per check; returns the number of failures.
int run_validation_suite(std::ostream& log);

}  // namespace iontrap
