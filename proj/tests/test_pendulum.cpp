#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ocpstab/errors.hpp"
#include "ocpstab/hbvp.hpp"
#include "ocpstab/pendulum.hpp"
#include "ocpstab/stability.hpp"

using namespace ocpstab;

namespace {

Eigen::VectorXd random_state(std::mt19937& rng) {
  std::uniform_real_distribution<double> dist(-1.5, 1.5);
  Eigen::VectorXd z(5);
  for (int i = 0; i < 5; ++i) z[i] = dist(rng);
  // keep the spring away from the coincident configuration
  const double l = std::hypot(z[1] - z[0], z[2]);
  if (l < 0.3) z[2] += 0.7;
  return z;
}

}  // namespace

TEST_CASE("spring gradient basics") {
  const Eigen::Vector2d x1(0.0, 0.0);
  SUBCASE("unstressed spring exerts no force") {
    const auto [g1, g2] = spring_gradient(x1, Eigen::Vector2d(0.0, 1.0), 2.5, 1.0);
    CHECK(g1.norm() == doctest::Approx(0.0));
    CHECK(g2.norm() == doctest::Approx(0.0));
  }
  SUBCASE("unit stretch along y") {
    const auto [g1, g2] = spring_gradient(x1, Eigen::Vector2d(0.0, 2.0), 1.0, 1.0);
    CHECK(g2[0] == doctest::Approx(0.0));
    CHECK(g2[1] == doctest::Approx(1.0));  // k (l - lo) = 1 along +y
    CHECK(g2.norm() == doctest::Approx(1.0));
  }
  SUBCASE("contributions are equal and opposite") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::Vector2d a(dist(rng), dist(rng));
      Eigen::Vector2d b(dist(rng), dist(rng));
      if ((b - a).norm() < 0.1) b[1] += 1.0;
      const auto [g1, g2] = spring_gradient(a, b, 1.7, 0.8);
      CHECK((g1 + g2).norm() < 1e-14 * (1.0 + g2.norm()));
    }
  }
  SUBCASE("coincident endpoints are singular") {
    CHECK_THROWS_AS(spring_gradient(x1, Eigen::Vector2d(0.0, 0.0), 1.0, 1.0),
                    SingularConfigurationError);
  }
}

TEST_CASE("spring gradient matches finite differences of the potential") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double k = 1.3, lo = 0.9;
  int checked = 0;
  while (checked < 20) {
    const Eigen::Vector2d x1(dist(rng), dist(rng));
    const Eigen::Vector2d x2(dist(rng), dist(rng));
    if ((x2 - x1).norm() < 0.2) continue;
    ++checked;
    const auto [g1, g2] = spring_gradient(x1, x2, k, lo);
    const double h = 1e-6;
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d dp = Eigen::Vector2d::Zero();
      dp[c] = h;
      const double fd1 =
          (spring_potential(x1 + dp, x2, k, lo) - spring_potential(x1 - dp, x2, k, lo)) / (2 * h);
      const double fd2 =
          (spring_potential(x1, x2 + dp, k, lo) - spring_potential(x1, x2 - dp, k, lo)) / (2 * h);
      CHECK(std::abs(g1[c] - fd1) < 1e-6 * std::max(1.0, std::abs(fd1)));
      CHECK(std::abs(g2[c] - fd2) < 1e-6 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST_CASE("default rest length is the initial spring length") {
  PendulumParams params;
  CHECK(params.effective_rest_length() == doctest::Approx(std::sqrt(0.3 * 0.3 + 1.0)).epsilon(1e-12));
  CHECK(params.effective_rest_length() == doctest::Approx(1.04403).epsilon(1e-5));
}

TEST_CASE("equilibrium configuration zeroes the residual rows") {
  // no gravity, unstressed spring, target at the initial state: the zero
  // trajectory solves the discrete system exactly
  PendulumParams params;
  params.a = 0.0;
  ControlProblem problem = pendulum_problem(params, 1e-2, 4.0);
  problem.target_state = problem.initial_state;
  const TimeGrid grid = make_grid(4.0, 5);
  VectorTrajectory traj(grid, 5, 1);
  for (int n = 0; n <= 5; ++n) traj.x[n] = problem.initial_state;
  const Eigen::VectorXd res = hbvp_residual(problem, traj, Scheme::midpoint());
  CHECK(res.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("pendulum state Jacobian matches finite differences of the dynamics") {
  const ControlProblem problem = pendulum_problem(PendulumParams{}, 1e-2, 4.0);
  std::mt19937 rng(23);
  Eigen::VectorXd u(1);
  u[0] = 0.7;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd z = random_state(rng);
    const Eigen::MatrixXd jac = problem.state_jacobian(z, u);
    for (int j = 0; j < 5; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(z[j]));
      Eigen::VectorXd zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const Eigen::VectorXd col = (problem.dynamics(zp, u) - problem.dynamics(zm, u)) / (2 * h);
      CHECK((jac.col(j) - col).cwiseAbs().maxCoeff() < 1e-6 * std::max(1.0, col.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("spring curvature contraction matches finite differences of the Jacobian") {
  const ControlProblem problem = pendulum_problem(PendulumParams{}, 1e-2, 4.0);
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd u(1);
  u[0] = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const Eigen::VectorXd z = random_state(rng);
    Eigen::VectorXd lambda(5);
    for (int i = 0; i < 5; ++i) lambda[i] = dist(rng);
    const Eigen::MatrixXd s = problem.state_hessian_contraction(z, u, lambda);
    for (int j = 0; j < 5; ++j) {
      const double h = 1e-6 * (1.0 + std::abs(z[j]));
      Eigen::VectorXd zp = z, zm = z;
      zp[j] += h;
      zm[j] -= h;
      const Eigen::VectorXd col =
          ((problem.state_jacobian(zp, u) - problem.state_jacobian(zm, u)).transpose() * lambda) /
          (2 * h);
      CHECK((s.col(j) - col).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, col.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("analytic Newton matrix matches an FD Jacobian on small pendulum instances") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> dist(-0.4, 0.4);
  for (int n_steps : {3, 5}) {
    const ControlProblem problem = pendulum_problem(PendulumParams{}, 1e-2, 1.0);
    const TimeGrid grid = make_grid(1.0, n_steps);
    const DiscreteHbvp sys(problem, grid, Scheme::midpoint());
    Eigen::VectorXd z = sys.forward_simulation_guess();
    for (int i = 0; i < z.size(); ++i) z[i] += dist(rng);

    const BandedMatrix jac = sys.jacobian(z);
    const Eigen::VectorXd base = sys.residual(z);
    double scale = 1.0;
    for (int j = 0; j < sys.unknown_count(); ++j) {
      for (int i = 0; i < sys.unknown_count(); ++i) {
        if (jac.in_band(i, j)) scale = std::max(scale, std::abs(jac.at(i, j)));
      }
    }
    for (int j = 0; j < sys.unknown_count(); ++j) {
      const double h = 1e-7 * (1.0 + std::abs(z[j]));
      Eigen::VectorXd zp = z;
      zp[j] += h;
      const Eigen::VectorXd col = (sys.residual(zp) - base) / h;
      for (int i = 0; i < sys.unknown_count(); ++i) {
        const double analytic = jac.in_band(i, j) ? jac.at(i, j) : 0.0;
        CHECK(std::abs(analytic - col[i]) < 1e-5 * scale);
      }
    }
  }
}

TEST_CASE("pendulum solves converge through the alpha continuation") {
  const PendulumParams params;
  const TimeGrid grid = make_grid(4.0, 20);
  const ControlProblem problem = pendulum_problem(params, 1e-2, 4.0);
  SolveReport report;
  const VectorTrajectory traj =
      alpha_continuation_solve(problem, grid, Scheme::midpoint(), {}, 1.0, &report);
  CHECK(report.final_residual <= 1e-10 * 10.0);
  CHECK((traj.x[0] - problem.initial_state).cwiseAbs().maxCoeff() == 0.0);
  CHECK(traj.lambda[20].cwiseAbs().maxCoeff() < 1e-12);
  // solution is a fixed point of the nodal residual as well
  const Eigen::VectorXd res = hbvp_residual(problem, traj, Scheme::midpoint());
  CHECK(res.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("oscillation grows as alpha shrinks") {
  const PendulumParams params;
  const TimeGrid grid = make_grid(4.0, 20);
  double prev_index = -1.0;
  for (double alpha : {1e-2, 1e-4}) {
    const ControlProblem problem = pendulum_problem(params, alpha, 4.0);
    const VectorTrajectory traj = alpha_continuation_solve(problem, grid, Scheme::midpoint());
    std::vector<double> u(grid.node_count());
    for (int n = 0; n <= grid.step_count(); ++n) u[n] = traj.u[n][0];
    const double idx = oscillation_index(u);
    CHECK(idx > prev_index);
    prev_index = idx;
  }
}
