#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ocpstab/grid.hpp"
#include "ocpstab/linear_analytic.hpp"

namespace ocpstab {

enum class Classification { Smooth, Oscillatory, BlowUp, Boundary };

const char* to_string(Classification c);

/// gamma = sqrt(b^2/m^2 + 1/(alpha m^2)), the continuous decay rate of the
/// coupled state/adjoint system.
double gamma(const LinearOCPParams& params);

/// Eigenvalues of the MP transition matrix as functions of gamma*dt.
/// Throws SingularPropagationError at gamma*dt = 2 (within 1e-9 relative).
std::pair<double, double> eigenvalues_mp(double gamma_dt);
double spectral_radius_mp(double gamma_dt);

/// iE counterparts; singular at gamma*dt = 1.
std::pair<double, double> eigenvalues_ie(double gamma_dt);
double spectral_radius_ie(double gamma_dt);

/// Oscillation threshold alpha_th: dt^2/(4 m^2 - b^2 dt^2) for MP,
/// dt^2/(m^2 - b^2 dt^2) for iE. Throws NoThresholdError when the
/// denominator is non-positive (oscillatory for every alpha at this dt);
/// throws ConfigError for a scheme that is neither MP nor iE.
double alpha_threshold(const Scheme& scheme, double m, double b, double dt);

/// Analytic classification. Boundary when alpha is within 1e-9 relative of
/// alpha_th, BlowUp when gamma*dt is within 1e-9 relative of the scheme's
/// singular point, otherwise the strict threshold comparison.
Classification classify(const LinearOCPParams& params, double dt, const Scheme& scheme);

struct StabilityReport {
  double gamma;
  double gamma_dt;
  double e1, e2;            // NaN at the singular point
  double spectral_radius;   // NaN at the singular point
  double alpha_th;          // +inf when no threshold exists
  Classification classification;
  double blowup_log10_distance;  // |log10(gamma*dt / singular point)|
  Scheme scheme = Scheme::midpoint();
};

StabilityReport stability_report(const LinearOCPParams& params, double dt, const Scheme& scheme);

/// Fraction of interior nodes whose neighbouring first differences alternate
/// in sign beyond the noise floor eps = 1e-9 * max|x|.
double oscillation_index(std::span<const double> x);

/// Linear problem parameters without the swept alpha.
struct SweepProblem {
  double m = 1.0, b = 1.0, a = 1.0, v0 = 0.0, vt = 20.0, T = 10.0;
  LinearOCPParams with_alpha(double alpha) const {
    return LinearOCPParams{m, b, a, v0, vt, T, alpha};
  }
};

/// Phase diagram over (alpha, dt). Cells are stored dt-major:
/// cell(i_dt, i_alpha) = i_dt * alpha_grid.size() + i_alpha.
struct PhaseDiagram {
  std::vector<double> alpha_grid;
  std::vector<double> dt_grid;
  std::vector<Classification> numeric;
  std::vector<Classification> analytic;
  std::vector<double> osc_index;
  std::vector<double> alpha_th;  // per dt column; +inf when absent

  size_t cell(size_t i_dt, size_t i_alpha) const { return i_dt * alpha_grid.size() + i_alpha; }
};

/// Per-cell numerical classification (banded solve + oscillation index with
/// threshold 0.25 on the u sequence) against the analytic classification.
/// Each cell solves on a grid with N = max(2, round(T/dt)) steps of exactly
/// the cell's dt. Cells whose solve fails are recorded as BlowUp. jobs = 0
/// uses the available hardware parallelism.
PhaseDiagram phase_sweep(const SweepProblem& problem, std::span<const double> alpha_grid,
                         std::span<const double> dt_grid, const Scheme& scheme, int jobs = 0);

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

constexpr double kOscillationClassifyThreshold = 0.25;

}  // namespace ocpstab
