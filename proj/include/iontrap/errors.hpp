#pragma once

#include <stdexcept>
#include <string>

namespace iontrap {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration file parse or validation failure.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Rotating-frame beta <= 0: no in-plane confinement at this rotation frequency.
class RadialConfinementError : public Error {
 public:
  using Error::Error;
};

/// Two ions closer than the singular-separation guard.
class CoincidentIonsError : public Error {
 public:
  using Error::Error;
};

/// Minimizer exhausted its iteration budget before reaching the gradient tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A transverse mode has non-positive stiffness: the single-plane crystal is unstable.
class UnstablePlanarCrystalError : public Error {
 public:
  using Error::Error;
};

/// ODF beatnote inside the guard band of a drumhead mode; the driven response diverges.
class ResonanceError : public Error {
 public:
  using Error::Error;
};

/// Power-law fit asked for with fewer than two distinct pair distances.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// Closed-form result requested for a preparation angle it does not cover.
class UnsupportedPreparationError : public Error {
 public:
  using Error::Error;
};

/// Exact statevector evolution requested for more spins than the configured cap.
class SizeCapError : public Error {
 public:
  using Error::Error;
};

}  // namespace iontrap
