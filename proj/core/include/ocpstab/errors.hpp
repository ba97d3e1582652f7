#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocpstab {

/// Invalid configuration values (bad grid sizes, non-positive masses, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An argument violated a documented precondition (programming error).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

/// Evaluation requested outside the valid domain (e.g. t outside [0, T]).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// The step-recurrence form does not exist: its denominator vanishes at the
/// scheme's singular point (gamma*dt = 2 for MP, gamma*dt = 1 for iE).
class SingularPropagationError : public std::runtime_error {
 public:
  SingularPropagationError(const std::string& what, double gamma_dt)
      : std::runtime_error(what), gamma_dt(gamma_dt) {}
  double gamma_dt;
};

/// No finite oscillation threshold exists at this step size; the response is
/// oscillatory for every alpha.
class NoThresholdError : public std::runtime_error {
 public:
  explicit NoThresholdError(const std::string& what) : std::runtime_error(what) {}
};

/// A global linear system could not be factorized or produced non-finite
/// values. Carries the gamma*dt diagnostic of the offending configuration
/// when known (NaN otherwise).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, double gamma_dt = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), gamma_dt(gamma_dt) {}
  double gamma_dt;
};

/// Newton iteration failed to reach the residual tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Geometrically degenerate state (e.g. coincident spring endpoints).
class SingularConfigurationError : public std::runtime_error {
 public:
  explicit SingularConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ocpstab
