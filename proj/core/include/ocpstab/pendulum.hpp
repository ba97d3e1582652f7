#pragma once

#include <Eigen/Core>
#include <utility>

#include "ocpstab/hbvp.hpp"

namespace ocpstab {

/// Planar elastic inverted pendulum: mass 1 slides along the x-axis with its
/// velocity as the control, mass 2 hangs off a spring of stiffness k and
/// rest length rest_length under gravity a. The cost tracks mass 2's height
/// toward x_target and penalizes the control velocity.
struct PendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double k = 1.0;
  double a = 1.0;
  double x_target = 2.0;
  Eigen::Vector2d x1_initial{0.0, 0.0};
  Eigen::Vector2d x2_initial{0.3, 1.0};
  /// Negative means "use the initial spring length" (unstressed start).
  double rest_length = -1.0;

  double effective_rest_length() const {
    return rest_length >= 0.0 ? rest_length : (x2_initial - x1_initial).norm();
  }
  void validate() const;
};

/// Gradient of U = (k/2)(|x2 - x1| - rest_length)^2 with respect to both
/// endpoints: returns (dU/dx1, dU/dx2), equal and opposite. Throws
/// SingularConfigurationError when the endpoints coincide (|x2-x1| < 1e-12).
std::pair<Eigen::Vector2d, Eigen::Vector2d> spring_gradient(const Eigen::Vector2d& x1,
                                                            const Eigen::Vector2d& x2, double k,
                                                            double rest_length);

double spring_potential(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2, double k,
                        double rest_length);

/// Reduced five-state formulation z = (x1, x2x, x2y, v2x, v2y) with scalar
/// control u = v1 entering as x1dot = u; mass 2 obeys
/// m2 v2dot = -grad_{x2} U - m2 a e_y. Cost: (x2y - x_target)^2/2 +
/// alpha u^2/2. Supplies the analytic curvature term of the spring force, so
/// the analytic Newton mode is exact.
ControlProblem pendulum_problem(const PendulumParams& params, double alpha, double final_time);

}  // namespace ocpstab
