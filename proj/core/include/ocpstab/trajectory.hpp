#pragma once

#include <Eigen/Core>
#include <vector>

#include "ocpstab/grid.hpp"

namespace ocpstab {

/// Nodal solution of the scalar (propelled-body) problem. All sequences have
/// length N+1; lambda[N] = 0 and v[0] = v_o after a BVP solve.
struct ScalarTrajectory {
  ScalarTrajectory(const TimeGrid& g)
      : grid(g), v(g.node_count(), 0.0), lambda(g.node_count(), 0.0), u(g.node_count(), 0.0) {}

  TimeGrid grid;
  std::vector<double> v;
  std::vector<double> lambda;
  std::vector<double> u;
};

/// Nodal state/adjoint/control sequences for a vector-valued problem.
struct VectorTrajectory {
  VectorTrajectory(const TimeGrid& g, int state_dim, int control_dim)
      : grid(g), state_dim(state_dim), control_dim(control_dim) {
    x.assign(g.node_count(), Eigen::VectorXd::Zero(state_dim));
    lambda.assign(g.node_count(), Eigen::VectorXd::Zero(state_dim));
    u.assign(g.node_count(), Eigen::VectorXd::Zero(control_dim));
  }

  TimeGrid grid;
  int state_dim;
  int control_dim;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> lambda;
  std::vector<Eigen::VectorXd> u;
};

}  // namespace ocpstab
