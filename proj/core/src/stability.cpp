#include "ocpstab/stability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "ocpstab/errors.hpp"
#include "ocpstab/linear_discrete.hpp"

namespace ocpstab {

namespace {

constexpr double kSingularRelTol = 1e-9;

double singular_gamma_dt(const Scheme& scheme) {
  if (scheme.is_midpoint()) return 2.0;
  if (scheme.is_implicit_euler()) return 1.0;
  throw ConfigError("stability analysis requires the MP or iE scheme");
}

}  // namespace

const char* to_string(Classification c) {
  switch (c) {
    case Classification::Smooth: return "Smooth";
    case Classification::Oscillatory: return "Oscillatory";
    case Classification::BlowUp: return "BlowUp";
    case Classification::Boundary: return "Boundary";
  }
  return "?";
}

double gamma(const LinearOCPParams& p) {
  p.validate();
  return std::sqrt(p.b * p.b / (p.m * p.m) + 1.0 / (p.alpha * p.m * p.m));
}

std::pair<double, double> eigenvalues_mp(double gamma_dt) {
  if (!(gamma_dt > 0.0)) throw ContractViolation("eigenvalues_mp: gamma*dt must be > 0");
  if (std::abs(gamma_dt - 2.0) <= kSingularRelTol * 2.0) {
    throw SingularPropagationError("eigenvalues_mp: blow-up at gamma*dt = 2", gamma_dt);
  }
  return {(2.0 + gamma_dt) / (2.0 - gamma_dt), (2.0 - gamma_dt) / (2.0 + gamma_dt)};
}

double spectral_radius_mp(double gamma_dt) {
  if (!(gamma_dt > 0.0)) throw ContractViolation("spectral_radius_mp: gamma*dt must be > 0");
  if (std::abs(gamma_dt - 2.0) <= kSingularRelTol * 2.0) {
    throw SingularPropagationError("spectral_radius_mp: blow-up at gamma*dt = 2", gamma_dt);
  }
  return (2.0 + gamma_dt) / std::abs(2.0 - gamma_dt);
}

std::pair<double, double> eigenvalues_ie(double gamma_dt) {
  if (!(gamma_dt > 0.0)) throw ContractViolation("eigenvalues_ie: gamma*dt must be > 0");
  if (std::abs(gamma_dt - 1.0) <= kSingularRelTol) {
    throw SingularPropagationError("eigenvalues_ie: blow-up at gamma*dt = 1", gamma_dt);
  }
  return {1.0 / (1.0 + gamma_dt), 1.0 / (1.0 - gamma_dt)};
}

double spectral_radius_ie(double gamma_dt) {
  if (!(gamma_dt > 0.0)) throw ContractViolation("spectral_radius_ie: gamma*dt must be > 0");
  if (std::abs(gamma_dt - 1.0) <= kSingularRelTol) {
    throw SingularPropagationError("spectral_radius_ie: blow-up at gamma*dt = 1", gamma_dt);
  }
  return 1.0 / std::abs(1.0 - gamma_dt);
}

double alpha_threshold(const Scheme& scheme, double m, double b, double dt) {
  if (!(m > 0.0) || !(b > 0.0) || !(dt > 0.0)) {
    throw ConfigError("alpha_threshold: m, b, dt must be > 0");
  }
  double den;
  if (scheme.is_midpoint()) {
    den = 4.0 * m * m - b * b * dt * dt;
  } else if (scheme.is_implicit_euler()) {
    den = m * m - b * b * dt * dt;
  } else {
    throw ConfigError("alpha_threshold: defined for the MP and iE schemes only");
  }
  if (!(den > 0.0)) {
    throw NoThresholdError("alpha_threshold: no finite threshold at this dt (oscillatory for all alpha)");
  }
  return dt * dt / den;
}

Classification classify(const LinearOCPParams& params, double dt, const Scheme& scheme) {
  params.validate();
  const double g_dt = gamma(params) * dt;
  const double singular = singular_gamma_dt(scheme);

  double a_th = std::numeric_limits<double>::infinity();
  bool has_threshold = true;
  try {
    a_th = alpha_threshold(scheme, params.m, params.b, dt);
  } catch (const NoThresholdError&) {
    has_threshold = false;
  }

  if (has_threshold && std::abs(params.alpha - a_th) <= kSingularRelTol * a_th) {
    return Classification::Boundary;
  }
  if (std::abs(g_dt - singular) <= kSingularRelTol * singular) {
    return Classification::BlowUp;
  }
  if (!has_threshold || params.alpha < a_th) return Classification::Oscillatory;
  return Classification::Smooth;
}

StabilityReport stability_report(const LinearOCPParams& params, double dt, const Scheme& scheme) {
  StabilityReport rep{};
  rep.scheme = scheme;
  rep.gamma = gamma(params);
  rep.gamma_dt = rep.gamma * dt;
  const double singular = singular_gamma_dt(scheme);
  rep.blowup_log10_distance = std::abs(std::log10(rep.gamma_dt / singular));
  try {
    auto [e1, e2] = scheme.is_midpoint() ? eigenvalues_mp(rep.gamma_dt) : eigenvalues_ie(rep.gamma_dt);
    rep.e1 = e1;
    rep.e2 = e2;
    rep.spectral_radius = std::max(std::abs(e1), std::abs(e2));
  } catch (const SingularPropagationError&) {
    rep.e1 = rep.e2 = rep.spectral_radius = std::numeric_limits<double>::quiet_NaN();
  }
  try {
    rep.alpha_th = alpha_threshold(scheme, params.m, params.b, dt);
  } catch (const NoThresholdError&) {
    rep.alpha_th = std::numeric_limits<double>::infinity();
  }
  rep.classification = classify(params, dt, scheme);
  return rep;
}

double oscillation_index(std::span<const double> x) {
  if (x.size() < 3) throw ContractViolation("oscillation_index: need at least 3 samples");
  double amax = 0.0;
  for (double v : x) amax = std::max(amax, std::abs(v));
  const double eps2 = (1e-9 * amax) * (1e-9 * amax);
  size_t count = 0;
  for (size_t n = 1; n + 1 < x.size(); ++n) {
    const double d0 = x[n] - x[n - 1];
    const double d1 = x[n + 1] - x[n];
    if (d1 * d0 < -eps2) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(x.size() - 2);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_spaced: need 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double llo = std::log10(lo), lhi = std::log10(hi);
  for (int i = 0; i < n; ++i) {
    out[i] = std::pow(10.0, llo + (lhi - llo) * i / (n - 1));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

PhaseDiagram phase_sweep(const SweepProblem& problem, std::span<const double> alpha_grid,
                         std::span<const double> dt_grid, const Scheme& scheme, int jobs) {
  for (size_t i = 1; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > alpha_grid[i - 1])) throw ConfigError("phase_sweep: alpha grid not increasing");
  }
  for (size_t i = 1; i < dt_grid.size(); ++i) {
    if (!(dt_grid[i] > dt_grid[i - 1])) throw ConfigError("phase_sweep: dt grid not increasing");
  }

  PhaseDiagram diag;
  diag.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  diag.dt_grid.assign(dt_grid.begin(), dt_grid.end());
  const size_t n_cells = alpha_grid.size() * dt_grid.size();
  diag.numeric.assign(n_cells, Classification::Smooth);
  diag.analytic.assign(n_cells, Classification::Smooth);
  diag.osc_index.assign(n_cells, 0.0);
  diag.alpha_th.resize(dt_grid.size());

  for (size_t j = 0; j < dt_grid.size(); ++j) {
    try {
      diag.alpha_th[j] = alpha_threshold(scheme, problem.m, problem.b, dt_grid[j]);
    } catch (const NoThresholdError&) {
      diag.alpha_th[j] = std::numeric_limits<double>::infinity();
    }
  }

  auto run_cell = [&](size_t idx) {
    const size_t j = idx / alpha_grid.size();
    const size_t i = idx % alpha_grid.size();
    const double dt = dt_grid[j];
    const LinearOCPParams params = problem.with_alpha(alpha_grid[i]);
    diag.analytic[idx] = classify(params, dt, scheme);

    // Honor the cell's exact dt; the horizon is rounded to a whole number
    // of steps.
    const int n_steps = std::max(2, static_cast<int>(std::llround(problem.T / dt)));
    try {
      TimeGrid grid(n_steps * dt, n_steps);
      ScalarTrajectory traj = solve_bvp(params, grid, scheme);
      const double idx_u = oscillation_index(traj.u);
      diag.osc_index[idx] = idx_u;
      diag.numeric[idx] = idx_u > kOscillationClassifyThreshold ? Classification::Oscillatory
                                                                : Classification::Smooth;
    } catch (const SolverError&) {
      diag.numeric[idx] = Classification::BlowUp;
      diag.osc_index[idx] = std::numeric_limits<double>::quiet_NaN();
    }
  };

  int n_workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(n_cells)));
  if (n_workers == 1) {
    for (size_t idx = 0; idx < n_cells; ++idx) run_cell(idx);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      pool.emplace_back([&] {
        for (size_t idx = next.fetch_add(1); idx < n_cells; idx = next.fetch_add(1)) {
          run_cell(idx);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  return diag;
}

}  // namespace ocpstab
