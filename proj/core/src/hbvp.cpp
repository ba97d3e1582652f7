#include "ocpstab/hbvp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ocpstab/errors.hpp"

namespace ocpstab {

void ControlProblem::validate() const {
  if (state_dim < 1 || control_dim < 1) throw ConfigError("ControlProblem: dimensions must be >= 1");
  if (!dynamics || !state_jacobian || !control_jacobian) {
    throw ConfigError("ControlProblem: dynamics and first-order Jacobians are required");
  }
  if (output_weight.rows() != state_dim || output_weight.cols() != state_dim) {
    throw ConfigError("ControlProblem: R must be n_x x n_x");
  }
  if (input_weight.rows() != control_dim || input_weight.cols() != control_dim) {
    throw ConfigError("ControlProblem: Q must be n_u x n_u");
  }
  if (!output_weight.isApprox(output_weight.transpose(), 1e-12)) {
    throw ConfigError("ControlProblem: R must be symmetric");
  }
  if (!input_weight.isApprox(input_weight.transpose(), 1e-12)) {
    throw ConfigError("ControlProblem: Q must be symmetric");
  }
  if (target_state.size() != state_dim) throw ConfigError("ControlProblem: x_t must have n_x entries");
  if (initial_state.size() != state_dim) throw ConfigError("ControlProblem: x_o must have n_x entries");
  if (!(alpha > 0.0)) throw ConfigError("ControlProblem: alpha must be > 0");
  if (!(final_time > 0.0)) throw ConfigError("ControlProblem: T must be > 0");
}

DiscreteHbvp::DiscreteHbvp(const ControlProblem& problem, const TimeGrid& grid, const Scheme& scheme)
    : problem_(problem), grid_(grid), scheme_(scheme) {
  problem_.validate();
  const int nx = problem_.state_dim, nu = problem_.control_dim, N = grid_.step_count();
  unknown_count_ = 2 * nx + N * (2 * nx + nu);
  bandwidth_ = 3 * nx + nu - 1;
}

namespace {

struct Layout {
  int nx, nu, N;
  int block;  // 2 nx + nu

  int col_x(int n) const { return n == 0 ? 0 : 2 * nx + (n - 1) * block + nu; }
  int col_lambda(int n) const { return n == 0 ? nx : 2 * nx + (n - 1) * block + nu + nx; }
  int col_w(int n) const { return 2 * nx + (n - 1) * block; }  // n >= 1

  int row_bc0() const { return 0; }
  int row_control(int n) const { return nx + (n - 1) * block; }
  int row_state(int n) const { return nx + (n - 1) * block + nu; }
  int row_adjoint(int n) const { return nx + (n - 1) * block + nu + nx; }
  int row_bcN() const { return nx + N * block; }
};

Layout layout_of(const ControlProblem& p, const TimeGrid& g) {
  return Layout{p.state_dim, p.control_dim, g.step_count(), 2 * p.state_dim + p.control_dim};
}

}  // namespace

Eigen::VectorXd DiscreteHbvp::residual(const Eigen::VectorXd& z) const {
  if (z.size() != unknown_count_) throw ContractViolation("DiscreteHbvp::residual: size mismatch");
  const Layout L = layout_of(problem_, grid_);
  const double dt = grid_.dt();
  const double tau = scheme_.tau();

  Eigen::VectorXd res(unknown_count_);
  res.segment(L.row_bc0(), L.nx) = z.segment(L.col_x(0), L.nx) - problem_.initial_state;

  for (int n = 1; n <= L.N; ++n) {
    const auto xp = z.segment(L.col_x(n - 1), L.nx);
    const auto xn = z.segment(L.col_x(n), L.nx);
    const auto lp = z.segment(L.col_lambda(n - 1), L.nx);
    const auto ln = z.segment(L.col_lambda(n), L.nx);
    const auto w = z.segment(L.col_w(n), L.nu);
    const Eigen::VectorXd xm = tau * xp + (1.0 - tau) * xn;
    const Eigen::VectorXd lm = tau * lp + (1.0 - tau) * ln;

    const Eigen::MatrixXd fx = problem_.state_jacobian(xm, w);
    const Eigen::MatrixXd fu = problem_.control_jacobian(xm, w);

    res.segment(L.row_control(n), L.nu) =
        problem_.alpha * (problem_.input_weight * w) + fu.transpose() * lm;
    res.segment(L.row_state(n), L.nx) = (xn - xp) / dt - problem_.dynamics(xm, w);
    res.segment(L.row_adjoint(n), L.nx) =
        (lp - ln) / dt - problem_.output_weight * (xm - problem_.target_state) -
        fx.transpose() * lm;
  }
  res.segment(L.row_bcN(), L.nx) = z.segment(L.col_lambda(L.N), L.nx);
  return res;
}

BandedMatrix DiscreteHbvp::jacobian(const Eigen::VectorXd& z) const {
  if (z.size() != unknown_count_) throw ContractViolation("DiscreteHbvp::jacobian: size mismatch");
  const Layout L = layout_of(problem_, grid_);
  const double dt = grid_.dt();
  const double tau = scheme_.tau();

  BandedMatrix jac(unknown_count_, bandwidth_, bandwidth_);
  auto add_block = [&jac](int r0, int c0, const Eigen::MatrixXd& blockmat) {
    for (int i = 0; i < blockmat.rows(); ++i) {
      for (int j = 0; j < blockmat.cols(); ++j) {
        if (blockmat(i, j) != 0.0) jac.add(r0 + i, c0 + j, blockmat(i, j));
      }
    }
  };

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(L.nx, L.nx);
  for (int i = 0; i < L.nx; ++i) jac.add(L.row_bc0() + i, L.col_x(0) + i, 1.0);

  for (int n = 1; n <= L.N; ++n) {
    const auto xp = z.segment(L.col_x(n - 1), L.nx);
    const auto xn = z.segment(L.col_x(n), L.nx);
    const auto lp = z.segment(L.col_lambda(n - 1), L.nx);
    const auto ln = z.segment(L.col_lambda(n), L.nx);
    const auto w = z.segment(L.col_w(n), L.nu);
    const Eigen::VectorXd xm = tau * xp + (1.0 - tau) * xn;
    const Eigen::VectorXd lm = tau * lp + (1.0 - tau) * ln;

    const Eigen::MatrixXd fx = problem_.state_jacobian(xm, w);
    const Eigen::MatrixXd fu = problem_.control_jacobian(xm, w);
    Eigen::MatrixXd curv = Eigen::MatrixXd::Zero(L.nx, L.nx);
    if (problem_.state_hessian_contraction) {
      curv = problem_.state_hessian_contraction(xm, w, lm);
    }

    // control rows: alpha Q w + fu' lm
    add_block(L.row_control(n), L.col_w(n), problem_.alpha * problem_.input_weight);
    add_block(L.row_control(n), L.col_lambda(n - 1), tau * fu.transpose());
    add_block(L.row_control(n), L.col_lambda(n), (1.0 - tau) * fu.transpose());

    // state rows: (xn - xp)/dt - f(xm, w)
    add_block(L.row_state(n), L.col_x(n - 1), -identity / dt - tau * fx);
    add_block(L.row_state(n), L.col_x(n), identity / dt - (1.0 - tau) * fx);
    add_block(L.row_state(n), L.col_w(n), -fu);

    // adjoint rows: (lp - ln)/dt - R(xm - xt) - fx' lm
    const Eigen::MatrixXd dadx = -(problem_.output_weight + curv);
    add_block(L.row_adjoint(n), L.col_lambda(n - 1), identity / dt - tau * fx.transpose());
    add_block(L.row_adjoint(n), L.col_lambda(n), -identity / dt - (1.0 - tau) * fx.transpose());
    add_block(L.row_adjoint(n), L.col_x(n - 1), tau * dadx);
    add_block(L.row_adjoint(n), L.col_x(n), (1.0 - tau) * dadx);
  }
  for (int i = 0; i < L.nx; ++i) jac.add(L.row_bcN() + i, L.col_lambda(L.N) + i, 1.0);
  return jac;
}

Eigen::VectorXd DiscreteHbvp::interpolation_guess() const {
  const Layout L = layout_of(problem_, grid_);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(unknown_count_);
  for (int n = 0; n <= L.N; ++n) {
    Eigen::VectorXd xg = problem_.initial_state;
    const double t = static_cast<double>(n) / L.N;
    for (int i = 0; i < L.nx; ++i) {
      if (problem_.output_weight(i, i) != 0.0) {
        xg[i] = (1.0 - t) * problem_.initial_state[i] + t * problem_.target_state[i];
      }
    }
    z.segment(L.col_x(n), L.nx) = xg;
  }
  return z;
}

Eigen::VectorXd DiscreteHbvp::forward_simulation_guess() const {
  const Layout L = layout_of(problem_, grid_);
  const double dt = grid_.dt();
  const double tau = scheme_.tau();
  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(L.nu);

  Eigen::VectorXd z = Eigen::VectorXd::Zero(unknown_count_);
  Eigen::VectorXd x_prev = problem_.initial_state;
  z.segment(L.col_x(0), L.nx) = x_prev;
  for (int n = 1; n <= L.N; ++n) {
    Eigen::VectorXd x = x_prev;
    for (int it = 0; it < 60; ++it) {
      const Eigen::VectorXd xm = tau * x_prev + (1.0 - tau) * x;
      const Eigen::VectorXd r = (x - x_prev) / dt - problem_.dynamics(xm, u0);
      if (r.cwiseAbs().maxCoeff() < 1e-13) break;
      const Eigen::MatrixXd jac = Eigen::MatrixXd::Identity(L.nx, L.nx) / dt -
                                  (1.0 - tau) * problem_.state_jacobian(xm, u0);
      x += jac.partialPivLu().solve(-r);
    }
    z.segment(L.col_x(n), L.nx) = x;
    x_prev = x;
  }
  return z;
}

Eigen::VectorXd DiscreteHbvp::pack(const VectorTrajectory& traj) const {
  const Layout L = layout_of(problem_, grid_);
  if (traj.state_dim != L.nx || traj.control_dim != L.nu ||
      traj.grid.node_count() != grid_.node_count()) {
    throw ContractViolation("DiscreteHbvp::pack: trajectory shape mismatch");
  }
  const double tau = scheme_.tau();
  Eigen::VectorXd z(unknown_count_);
  for (int n = 0; n <= L.N; ++n) {
    z.segment(L.col_x(n), L.nx) = traj.x[n];
    z.segment(L.col_lambda(n), L.nx) = traj.lambda[n];
    if (n >= 1) {
      z.segment(L.col_w(n), L.nu) = tau * traj.u[n - 1] + (1.0 - tau) * traj.u[n];
    }
  }
  return z;
}

VectorTrajectory DiscreteHbvp::unpack(const Eigen::VectorXd& z) const {
  const Layout L = layout_of(problem_, grid_);
  VectorTrajectory traj(grid_, L.nx, L.nu);
  for (int n = 0; n <= L.N; ++n) {
    traj.x[n] = z.segment(L.col_x(n), L.nx);
    traj.lambda[n] = z.segment(L.col_lambda(n), L.nx);
  }
  traj.x[0] = problem_.initial_state;
  traj.lambda[L.N].setZero();
  // Nodal controls from the nodal control-algebraic equation
  // alpha Q u + (grad_u f)' lambda = 0, solved by fixed point (one step is
  // exact for a constant input map).
  Eigen::PartialPivLU<Eigen::MatrixXd> qlu(problem_.alpha * problem_.input_weight);
  for (int n = 0; n <= L.N; ++n) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(L.nu);
    for (int it = 0; it < 30; ++it) {
      const Eigen::MatrixXd fu = problem_.control_jacobian(traj.x[n], u);
      const Eigen::VectorXd u_next = qlu.solve(-fu.transpose() * traj.lambda[n]);
      const double delta = (u_next - u).cwiseAbs().maxCoeff();
      u = u_next;
      if (delta < 1e-14 * (1.0 + u.cwiseAbs().maxCoeff())) break;
    }
    traj.u[n] = u;
  }
  return traj;
}

Eigen::VectorXd hbvp_residual(const ControlProblem& problem, const VectorTrajectory& traj,
                              const Scheme& scheme) {
  problem.validate();
  const int nx = problem.state_dim, nu = problem.control_dim;
  const int N = traj.grid.step_count();
  const double dt = traj.grid.dt();
  const double tau = scheme.tau();
  if (traj.state_dim != nx || traj.control_dim != nu) {
    throw ContractViolation("hbvp_residual: trajectory dimensions do not match the problem");
  }

  Eigen::VectorXd res(2 * nx + N * (2 * nx + nu));
  int row = 0;
  res.segment(row, nx) = traj.x[0] - problem.initial_state;
  row += nx;
  for (int n = 1; n <= N; ++n) {
    const Eigen::VectorXd xm = tau * traj.x[n - 1] + (1.0 - tau) * traj.x[n];
    const Eigen::VectorXd lm = tau * traj.lambda[n - 1] + (1.0 - tau) * traj.lambda[n];
    const Eigen::VectorXd um = tau * traj.u[n - 1] + (1.0 - tau) * traj.u[n];
    const Eigen::MatrixXd fx = problem.state_jacobian(xm, um);
    const Eigen::MatrixXd fu = problem.control_jacobian(xm, um);
    res.segment(row, nx) = (traj.lambda[n - 1] - traj.lambda[n]) / dt -
                           problem.output_weight * (xm - problem.target_state) -
                           fx.transpose() * lm;
    row += nx;
    res.segment(row, nx) = (traj.x[n] - traj.x[n - 1]) / dt - problem.dynamics(xm, um);
    row += nx;
    res.segment(row, nu) = problem.alpha * (problem.input_weight * um) + fu.transpose() * lm;
    row += nu;
  }
  res.segment(row, nx) = traj.lambda[N];
  return res;
}

namespace {

Eigen::VectorXd solve_newton_step(const DiscreteHbvp& sys, const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& res, const NewtonSettings& settings) {
  if (settings.jacobian_mode == NewtonSettings::JacobianMode::Analytic) {
    BandedMatrix jac = sys.jacobian(z);
    std::vector<double> rhs(res.size());
    for (int i = 0; i < res.size(); ++i) rhs[i] = -res[i];
    try {
      BandedLU lu(std::move(jac));
      lu.solve_in_place(rhs);
    } catch (const SolverError&) {
      throw SolverError("newton_solve: singular Newton matrix");
    }
    Eigen::VectorXd step(res.size());
    for (int i = 0; i < res.size(); ++i) step[i] = rhs[i];
    return step;
  }
  // Finite-difference Jacobian, dense solve; intended for small systems.
  const int n = static_cast<int>(z.size());
  Eigen::MatrixXd jac(n, n);
  Eigen::VectorXd zp = z;
  for (int j = 0; j < n; ++j) {
    const double h = settings.fd_step * (1.0 + std::abs(z[j]));
    zp[j] = z[j] + h;
    jac.col(j) = (sys.residual(zp) - res) / h;
    zp[j] = z[j];
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
  const Eigen::VectorXd step = lu.solve(-res);
  if (!step.allFinite()) throw SolverError("newton_solve: singular finite-difference Newton matrix");
  return step;
}

VectorTrajectory newton_iterate(const DiscreteHbvp& sys, Eigen::VectorXd z,
                                const NewtonSettings& settings, SolveReport* report) {
  std::vector<double> history;
  Eigen::VectorXd res = sys.residual(z);
  double res_norm = res.cwiseAbs().maxCoeff();
  history.push_back(res_norm);
  const double threshold = settings.tolerance * std::max(1.0, res_norm);

  int it = 0;
  while (res_norm > threshold) {
    if (it >= settings.max_iterations) {
      throw ConvergenceError("newton_solve: no convergence after " +
                                 std::to_string(settings.max_iterations) + " iterations",
                             history);
    }
    const Eigen::VectorXd step = solve_newton_step(sys, z, res, settings);
    double t = 1.0;
    if (settings.line_search) {
      const double res2 = res.norm();
      bool accepted = false;
      for (int back = 0; back < 40; ++back) {
        const Eigen::VectorXd z_trial = z + t * step;
        const Eigen::VectorXd res_trial = sys.residual(z_trial);
        if (res_trial.allFinite() && res_trial.norm() <= (1.0 - 1e-4 * t) * res2) {
          z = z_trial;
          res = res_trial;
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) {
        throw ConvergenceError("newton_solve: line search stalled", history);
      }
    } else {
      z += step;
      res = sys.residual(z);
    }
    res_norm = res.cwiseAbs().maxCoeff();
    history.push_back(res_norm);
    ++it;
  }

  if (report) {
    report->iterations = it;
    report->final_residual = res_norm;
    report->residual_history = history;
  }
  return sys.unpack(z);
}

}  // namespace

VectorTrajectory newton_solve(const ControlProblem& problem, const TimeGrid& grid,
                              const Scheme& scheme, const NewtonSettings& settings,
                              const VectorTrajectory* guess, SolveReport* report) {
  DiscreteHbvp sys(problem, grid, scheme);
  Eigen::VectorXd z = guess ? sys.pack(*guess) : sys.interpolation_guess();
  return newton_iterate(sys, std::move(z), settings, report);
}

VectorTrajectory alpha_continuation_solve(const ControlProblem& problem, const TimeGrid& grid,
                                          const Scheme& scheme, const NewtonSettings& settings,
                                          double alpha_start, SolveReport* report) {
  problem.validate();
  if (!(alpha_start >= problem.alpha)) {
    throw ConfigError("alpha_continuation_solve: alpha_start must be >= target alpha");
  }

  SolveReport accumulated;
  ControlProblem stage_problem = problem;
  VectorTrajectory result(grid, problem.state_dim, problem.control_dim);

  auto solve_stage = [&](double alpha, const Eigen::VectorXd& z0) {
    stage_problem.alpha = alpha;
    DiscreteHbvp sys(stage_problem, grid, scheme);
    SolveReport stage_report;
    result = newton_iterate(sys, z0, settings, &stage_report);
    accumulated.iterations += stage_report.iterations;
    accumulated.residual_history.insert(accumulated.residual_history.end(),
                                        stage_report.residual_history.begin(),
                                        stage_report.residual_history.end());
    accumulated.final_residual = stage_report.final_residual;
    return sys.pack(result);
  };

  stage_problem.alpha = alpha_start;
  Eigen::VectorXd z_good = solve_stage(alpha_start, DiscreteHbvp(stage_problem, grid, scheme)
                                                        .forward_simulation_guess());
  double alpha_good = alpha_start;
  double factor = 0.5;
  while (alpha_good > problem.alpha) {
    const double alpha_next = std::max(alpha_good * factor, problem.alpha);
    try {
      z_good = solve_stage(alpha_next, z_good);
      alpha_good = alpha_next;
    } catch (const ConvergenceError& e) {
      accumulated.iterations += static_cast<int>(e.residual_history.size()) - 1;
      factor = std::sqrt(factor);
      if (factor > 0.995) {
        throw ConvergenceError("alpha_continuation_solve: stalled at alpha = " +
                                   std::to_string(alpha_good),
                               e.residual_history);
      }
    }
  }
  if (report) *report = accumulated;
  return result;
}

double control_hamiltonian(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& lambda, const ControlProblem& problem) {
  const Eigen::VectorXd dx = x - problem.target_state;
  return 0.5 * dx.dot(problem.output_weight * dx) +
         0.5 * problem.alpha * u.dot(problem.input_weight * u) +
         lambda.dot(problem.dynamics(x, u));
}

ControlProblem wrap_linear(const LinearOCPParams& params) {
  params.validate();
  ControlProblem p;
  p.state_dim = 1;
  p.control_dim = 1;
  const double m = params.m, b = params.b, a = params.a;
  p.dynamics = [m, b, a](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd f(1);
    f[0] = -(b / m) * x[0] + u[0] / m - a;
    return f;
  };
  p.state_jacobian = [m, b](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = -(b / m);
    return j;
  };
  p.control_jacobian = [m](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 1.0 / m;
    return j;
  };
  p.output_weight = Eigen::MatrixXd::Identity(1, 1);
  p.input_weight = Eigen::MatrixXd::Identity(1, 1);
  p.target_state = Eigen::VectorXd::Constant(1, params.vt);
  p.initial_state = Eigen::VectorXd::Constant(1, params.v0);
  p.alpha = params.alpha;
  p.final_time = params.T;
  return p;
}

}  // namespace ocpstab
