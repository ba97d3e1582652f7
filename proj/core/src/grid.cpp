#include "ocpstab/grid.hpp"

#include <cmath>
#include <string>

#include "ocpstab/errors.hpp"

namespace ocpstab {

TimeGrid::TimeGrid(double final_time, int step_count)
    : final_time_(final_time), step_count_(step_count), dt_(final_time / step_count) {
  if (!(final_time > 0.0)) {
    throw ConfigError("TimeGrid: final time must be positive, got " + std::to_string(final_time));
  }
  if (step_count < 2) {
    throw ConfigError("TimeGrid: need at least 2 steps, got " + std::to_string(step_count));
  }
}

TimeGrid TimeGrid::from_step(double final_time, double dt_request) {
  if (!(final_time > 0.0) || !(dt_request > 0.0)) {
    throw ConfigError("TimeGrid::from_step: T and dt must be positive");
  }
  const int n = static_cast<int>(std::llround(final_time / dt_request));
  if (n < 2) {
    throw ConfigError("TimeGrid::from_step: dt too large, fewer than 2 steps");
  }
  if (std::abs(n * dt_request - final_time) > 1e-9 * final_time) {
    throw ConfigError("TimeGrid::from_step: dt does not divide T (|N*dt - T|/T > 1e-9)");
  }
  return TimeGrid(final_time, n);
}

TimeGrid make_grid(double final_time, int step_count) {
  return TimeGrid(final_time, step_count);
}

Scheme Scheme::from_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 0.5)) {
    throw ConfigError("Scheme: tau must lie in [0, 1/2], got " + std::to_string(tau));
  }
  return Scheme(tau);
}

const char* Scheme::name() const {
  if (is_implicit_euler()) return "ie";
  if (is_midpoint()) return "mp";
  return "theta";
}

double interpolated_node(std::span<const double> seq, int n, double tau) {
  if (n < 1 || static_cast<size_t>(n) >= seq.size()) {
    throw ContractViolation("interpolated_node: n out of range");
  }
  if (!(tau >= 0.0 && tau <= 0.5)) {
    throw ContractViolation("interpolated_node: tau outside [0, 1/2]");
  }
  return tau * seq[n - 1] + (1.0 - tau) * seq[n];
}

}  // namespace ocpstab
