#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "ocpstab/grid.hpp"
#include "ocpstab/linear_analytic.hpp"
#include "ocpstab/trajectory.hpp"

namespace ocpstab {

/// Reduced-system coefficients of the mid-point discretization.
struct MPCoefficients {
  double p;  // b/m + 2/dt
  double q;  // b/m - 2/dt
  double s;  // 1/(alpha m^2)
};

/// Reduced-system coefficients of the implicit-Euler discretization.
struct IECoefficients {
  double p_star;  // b/m + 1/dt
  double q_star;  // b/m - 1/dt
  double r;       // 1/dt
  double s;       // 1/(alpha m^2)
};

MPCoefficients assemble_mp(const LinearOCPParams& params, double dt);
IECoefficients assemble_ie(const LinearOCPParams& params, double dt);

/// Affine step recurrence z_n = A z_{n-1} + a over z = (v, lambda).
struct PropagationForm {
  Eigen::Matrix2d transition;
  Eigen::Vector2d affine;
  Scheme scheme = Scheme::midpoint();
};

/// Throws SingularPropagationError when the reduced-system denominator
/// vanishes (gamma*dt = 2).
PropagationForm propagation_mp(const LinearOCPParams& params, double dt);

/// iE counterpart; singular at gamma*dt = 1.
PropagationForm propagation_ie(const LinearOCPParams& params, double dt);

/// Solves the discretized two-point boundary value problem as one banded
/// linear system over all nodal (v_n, lambda_n), with v_0 = v0 and
/// lambda_N = 0 enforced exactly. Controls are recovered nodewise from
/// u_n = -lambda_n/(alpha m). Works for any tau in [0, 1/2].
ScalarTrajectory solve_bvp(const LinearOCPParams& params, const TimeGrid& grid, const Scheme& scheme);

/// Forward run of the affine recurrence; stops early and records the step
/// index if any component exceeds 1e300 in magnitude.
struct PropagationRun {
  std::vector<Eigen::Vector2d> z;
  std::optional<int> blowup_step;
};

PropagationRun propagate(const PropagationForm& form, const Eigen::Vector2d& z0, int steps);

}  // namespace ocpstab
