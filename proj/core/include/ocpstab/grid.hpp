#pragma once

#include <span>

namespace ocpstab {

/// Uniform time grid on [0, T] with N steps. Node times are t_n = n * (T/N),
/// n = 0..N, so t_N reproduces T to within one rounding.
class TimeGrid {
 public:
  TimeGrid(double final_time, int step_count);

  double final_time() const { return final_time_; }
  int step_count() const { return step_count_; }
  double dt() const { return dt_; }
  double node(int n) const { return n * dt_; }
  int node_count() const { return step_count_ + 1; }

  /// Builds a grid from a requested step size using N = round(T/dt).
  /// Rejects requests where the rounded step count does not reproduce T
  /// (|N*dt - T|/T > 1e-9).
  static TimeGrid from_step(double final_time, double dt_request);

 private:
  double final_time_;
  int step_count_;
  double dt_;
};

TimeGrid make_grid(double final_time, int step_count);

/// Discretization scheme of the one-parameter family x_{n-tau} :=
/// tau*x_{n-1} + (1-tau)*x_n, tau in [0, 1/2]. tau = 0 is implicit Euler,
/// tau = 1/2 the mid-point rule.
class Scheme {
 public:
  static Scheme implicit_euler() { return Scheme(0.0); }
  static Scheme midpoint() { return Scheme(0.5); }
  static Scheme from_tau(double tau);

  double tau() const { return tau_; }
  bool is_implicit_euler() const { return tau_ == 0.0; }
  bool is_midpoint() const { return tau_ == 0.5; }
  const char* name() const;

 private:
  explicit Scheme(double tau) : tau_(tau) {}
  double tau_;
};

/// Stage value tau*seq[n-1] + (1-tau)*seq[n] for 1 <= n <= N.
double interpolated_node(std::span<const double> seq, int n, double tau);

}  // namespace ocpstab
