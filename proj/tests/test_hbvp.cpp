#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "ocpstab/errors.hpp"
#include "ocpstab/hbvp.hpp"
#include "ocpstab/linear_analytic.hpp"
#include "ocpstab/linear_discrete.hpp"

using namespace ocpstab;

namespace {

LinearOCPParams reference_params(double alpha) {
  return LinearOCPParams{1.0, 1.0, 1.0, 0.0, 20.0, 10.0, alpha};
}

VectorTrajectory to_vector_trajectory(const ScalarTrajectory& traj) {
  VectorTrajectory vt(traj.grid, 1, 1);
  for (int n = 0; n <= traj.grid.step_count(); ++n) {
    vt.x[n][0] = traj.v[n];
    vt.lambda[n][0] = traj.lambda[n];
    vt.u[n][0] = traj.u[n];
  }
  return vt;
}

}  // namespace

TEST_CASE("newton_solve reproduces the banded solve on the wrapped linear problem") {
  const LinearOCPParams params = reference_params(1e-1);
  const ControlProblem problem = wrap_linear(params);
  const TimeGrid grid = make_grid(params.T, 100);
  for (const Scheme& scheme : {Scheme::midpoint(), Scheme::implicit_euler()}) {
    const ScalarTrajectory reference = solve_bvp(params, grid, scheme);
    SolveReport report;
    const VectorTrajectory traj = newton_solve(problem, grid, scheme, {}, nullptr, &report);
    CHECK(report.iterations <= 2);
    double worst = 0.0;
    for (int n = 0; n <= grid.step_count(); ++n) {
      worst = std::max(worst, std::abs(traj.x[n][0] - reference.v[n]));
      worst = std::max(worst, std::abs(traj.lambda[n][0] - reference.lambda[n]));
      worst = std::max(worst, std::abs(traj.u[n][0] - reference.u[n]));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("hbvp_residual of the banded solution is tiny") {
  const LinearOCPParams params = reference_params(1e-2);
  const ControlProblem problem = wrap_linear(params);
  const TimeGrid grid = make_grid(params.T, 100);
  const auto traj = to_vector_trajectory(solve_bvp(params, grid, Scheme::midpoint()));
  const Eigen::VectorXd res = hbvp_residual(problem, traj, Scheme::midpoint());
  CHECK(res.cwiseAbs().maxCoeff() < 1e-10 * 200.0);  // trajectory magnitude ~ 2e2
}

TEST_CASE("converged solve is a fixed point of the residual") {
  const LinearOCPParams params = reference_params(1e-1);
  const ControlProblem problem = wrap_linear(params);
  const TimeGrid grid = make_grid(params.T, 50);
  const VectorTrajectory traj = newton_solve(problem, grid, Scheme::midpoint());
  const Eigen::VectorXd res = hbvp_residual(problem, traj, Scheme::midpoint());
  CHECK(res.cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("boundary rows hold exactly after convergence") {
  const LinearOCPParams params = reference_params(1e-1);
  const ControlProblem problem = wrap_linear(params);
  const TimeGrid grid = make_grid(params.T, 50);
  const VectorTrajectory traj = newton_solve(problem, grid, Scheme::midpoint());
  CHECK(traj.x[0][0] == params.v0);
  CHECK(traj.lambda[50].cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("control Hamiltonian basics") {
  const ControlProblem problem = wrap_linear(reference_params(1e-1));
  const Eigen::VectorXd xt = problem.target_state;
  CHECK(control_hamiltonian(xt, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1), problem) == 0.0);
}

TEST_CASE("control Hamiltonian is conserved along the analytic optimum") {
  const LinearOCPParams params = reference_params(1e-1);
  const ControlProblem problem = wrap_linear(params);
  const AnalyticSolution sol = derive_constants(params);
  double hmin = 1e300, hmax = -1e300;
  for (int i = 0; i <= 99; ++i) {
    const double t = params.T * i / 99.0;
    Eigen::VectorXd x(1), u(1), l(1);
    x[0] = sol.v(t);
    l[0] = sol.lambda(t);
    u[0] = sol.u(t);
    const double h = control_hamiltonian(x, u, l, problem);
    hmin = std::min(hmin, h);
    hmax = std::max(hmax, h);
  }
  CHECK((hmax - hmin) < 1e-8 * std::max(std::abs(hmax), 1.0));
}

TEST_CASE("finite-difference Jacobian mode solves the linear problem too") {
  const LinearOCPParams params = reference_params(1e-1);
  const ControlProblem problem = wrap_linear(params);
  const TimeGrid grid = make_grid(params.T, 10);
  NewtonSettings settings;
  settings.jacobian_mode = NewtonSettings::JacobianMode::FiniteDifference;
  settings.tolerance = 1e-8;
  const VectorTrajectory fd = newton_solve(problem, grid, Scheme::midpoint(), settings);
  const ScalarTrajectory reference = solve_bvp(params, grid, Scheme::midpoint());
  for (int n = 0; n <= 10; ++n) {
    CHECK(fd.x[n][0] == doctest::Approx(reference.v[n]).epsilon(1e-6));
  }
}

TEST_CASE("analytic banded Jacobian matches finite differences on the wrapped linear problem") {
  const ControlProblem problem = wrap_linear(reference_params(1e-1));
  const TimeGrid grid = make_grid(10.0, 4);
  const DiscreteHbvp sys(problem, grid, Scheme::midpoint());
  Eigen::VectorXd z = sys.interpolation_guess();
  for (int i = 0; i < z.size(); ++i) z[i] += 0.01 * std::sin(3.0 * i + 1.0);

  const BandedMatrix jac = sys.jacobian(z);
  const Eigen::VectorXd base = sys.residual(z);
  const int n = sys.unknown_count();
  for (int j = 0; j < n; ++j) {
    const double h = 1e-7 * (1.0 + std::abs(z[j]));
    Eigen::VectorXd zp = z;
    zp[j] += h;
    const Eigen::VectorXd col = (sys.residual(zp) - base) / h;
    for (int i = 0; i < n; ++i) {
      const double analytic = jac.in_band(i, j) ? jac.at(i, j) : 0.0;
      CHECK(std::abs(analytic - col[i]) < 1e-5 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST_CASE("newton_solve reports non-convergence with history") {
  ControlProblem problem = wrap_linear(reference_params(1e-1));
  // a strongly nonlinear scalar made to defeat a 1-iteration budget
  problem.dynamics = [](const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    Eigen::VectorXd f(1);
    f[0] = std::sin(3.0 * x[0]) * 5.0 + u[0] - 4.0;
    return f;
  };
  problem.state_jacobian = [](const Eigen::VectorXd& x, const Eigen::VectorXd&) {
    Eigen::MatrixXd j(1, 1);
    j(0, 0) = 15.0 * std::cos(3.0 * x[0]);
    return j;
  };
  // exact curvature omitted on purpose; with max_iterations = 1 the solve
  // must fail and carry its residual history
  NewtonSettings settings;
  settings.max_iterations = 1;
  settings.line_search = false;
  const TimeGrid grid = make_grid(10.0, 10);
  try {
    newton_solve(problem, grid, Scheme::midpoint(), settings);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual_history.size() >= 1);
  }
}

TEST_CASE("dimension mismatches are contract violations") {
  const ControlProblem problem = wrap_linear(reference_params(1e-1));
  const TimeGrid grid = make_grid(10.0, 10);
  VectorTrajectory wrong(grid, 2, 1);
  CHECK_THROWS_AS(hbvp_residual(problem, wrong, Scheme::midpoint()), ContractViolation);
}

TEST_CASE("default guess interpolates only the tracked components") {
  ControlProblem problem = wrap_linear(reference_params(1e-1));
  const TimeGrid grid = make_grid(10.0, 4);
  const DiscreteHbvp sys(problem, grid, Scheme::midpoint());
  const VectorTrajectory guess = sys.unpack(sys.interpolation_guess());
  CHECK(guess.x[0][0] == doctest::Approx(0.0));
  CHECK(guess.x[4][0] == doctest::Approx(20.0));
  CHECK(guess.x[2][0] == doctest::Approx(10.0));
}
