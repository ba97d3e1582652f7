#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "ocpstab/banded.hpp"
#include "ocpstab/grid.hpp"
#include "ocpstab/linear_analytic.hpp"
#include "ocpstab/trajectory.hpp"

namespace ocpstab {

/// A control problem min integral( (x-x_t)' R (x-x_t)/2 + alpha u' Q u / 2 )
/// subject to xdot = f(x, u), x(0) = x_o, on [0, T].
///
/// The analytic Newton path assumes grad_u f is constant (control-affine
/// dynamics with a fixed input map), which both shipped problems satisfy.
/// state_hessian_contraction supplies sum_k lambda_k * d^2 f_k / dx dx; when
/// absent it is taken as zero, which is exact for dynamics linear in x.
/// Problems nonlinear in x must provide it for the analytic Jacobian mode;
/// the finite-difference mode needs none of this.
struct ControlProblem {
  int state_dim = 0;
  int control_dim = 0;

  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> dynamics;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> state_jacobian;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> control_jacobian;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&,
                                const Eigen::VectorXd&)>
      state_hessian_contraction;  // optional

  Eigen::MatrixXd output_weight;  // R, n_x x n_x PSD
  Eigen::MatrixXd input_weight;   // Q, n_u x n_u PSD (invertible for nodal control recovery)
  Eigen::VectorXd target_state;   // x_t
  double alpha = 1.0;
  Eigen::VectorXd initial_state;  // x_o
  double final_time = 1.0;

  void validate() const;
};

struct NewtonSettings {
  double tolerance = 1e-10;  // on the max-norm, scaled by max(1, initial residual)
  int max_iterations = 50;
  enum class JacobianMode { Analytic, FiniteDifference };
  JacobianMode jacobian_mode = JacobianMode::Analytic;
  double fd_step = 1e-7;  // per-column step 1e-7 * (1 + |x_j|)
  bool line_search = true;
};

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
};

/// The tau-discretized Euler-Lagrange system over one grid. Unknowns are the
/// nodal states and adjoints plus the stage controls w_n = u_{n-tau}
/// (n = 1..N), packed as [x_0, lambda_0, (w_1, x_1, lambda_1), ...]; this
/// makes the Newton matrix square and banded.
class DiscreteHbvp {
 public:
  DiscreteHbvp(const ControlProblem& problem, const TimeGrid& grid, const Scheme& scheme);

  int unknown_count() const { return unknown_count_; }
  int lower_bandwidth() const { return bandwidth_; }
  int upper_bandwidth() const { return bandwidth_; }

  Eigen::VectorXd residual(const Eigen::VectorXd& unknowns) const;
  BandedMatrix jacobian(const Eigen::VectorXd& unknowns) const;

  /// States interpolated from x_o toward the R-weighted components of x_t,
  /// adjoints and controls zero.
  Eigen::VectorXd interpolation_guess() const;

  /// Uncontrolled (u = 0) forward integration of the dynamics with the same
  /// scheme; adjoints and controls zero.
  Eigen::VectorXd forward_simulation_guess() const;

  Eigen::VectorXd pack(const VectorTrajectory& traj) const;
  VectorTrajectory unpack(const Eigen::VectorXd& unknowns) const;

  const ControlProblem& problem() const { return problem_; }
  const TimeGrid& grid() const { return grid_; }
  const Scheme& scheme() const { return scheme_; }

 private:
  ControlProblem problem_;
  TimeGrid grid_;
  Scheme scheme_;
  int unknown_count_;
  int bandwidth_;

  friend class HbvpNewton;
};

/// Stacked residual of the discrete Euler-Lagrange system for a nodal
/// trajectory; stage controls are produced by interpolation. Row order:
/// x_0 - x_o, then per interval (adjoint, state, control), then lambda_N.
Eigen::VectorXd hbvp_residual(const ControlProblem& problem, const VectorTrajectory& traj,
                              const Scheme& scheme);

/// Damped Newton iteration on the discrete system. guess = nullptr starts
/// from the interpolation guess. Throws ConvergenceError when the tolerance
/// is not met within max_iterations, SolverError on a singular Newton matrix.
VectorTrajectory newton_solve(const ControlProblem& problem, const TimeGrid& grid,
                              const Scheme& scheme, const NewtonSettings& settings = {},
                              const VectorTrajectory* guess = nullptr,
                              SolveReport* report = nullptr);

/// Continuation in the control-cost weight: anchors at alpha_start with the
/// forward-simulation guess and halves alpha toward problem.alpha, warm-
/// starting each stage; stages that fail retry with a smaller step. The
/// report accumulates iterations over all stages; final_residual is the
/// target stage's.
VectorTrajectory alpha_continuation_solve(const ControlProblem& problem, const TimeGrid& grid,
                                          const Scheme& scheme, const NewtonSettings& settings = {},
                                          double alpha_start = 1.0, SolveReport* report = nullptr);

/// H = (x-x_t)' R (x-x_t)/2 + alpha u' Q u/2 + lambda' f(x, u).
double control_hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& lambda, const ControlProblem& problem);

/// The scalar propelled-body problem as a 1-state/1-control ControlProblem.
ControlProblem wrap_linear(const LinearOCPParams& params);

}  // namespace ocpstab
