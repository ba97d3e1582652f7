#include "ocpstab/pendulum.hpp"

#include <cmath>

#include "ocpstab/errors.hpp"

namespace ocpstab {

namespace {

constexpr double kCoincidenceTol = 1e-12;

// Geometry of the reduced state: x1 = (z0, 0), x2 = (z1, z2).
struct SpringGeometry {
  Eigen::Vector2d d;   // x2 - x1
  double l;
  Eigen::Vector2d n;   // d / l

  explicit SpringGeometry(const Eigen::VectorXd& z) {
    d << z[1] - z[0], z[2];
    l = d.norm();
    if (l < kCoincidenceTol) {
      throw SingularConfigurationError("pendulum: spring endpoints coincide");
    }
    n = d / l;
  }
};

// w = (z1 - z0, z2) as a linear map of (z0, z1, z2)
const Eigen::Matrix<double, 2, 3> kChain = (Eigen::Matrix<double, 2, 3>() <<
    -1.0, 1.0, 0.0,
     0.0, 0.0, 1.0).finished();

}  // namespace

void PendulumParams::validate() const {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw ConfigError("PendulumParams: masses must be > 0");
  if (!(k > 0.0)) throw ConfigError("PendulumParams: k must be > 0");
  if (!(a >= 0.0)) throw ConfigError("PendulumParams: a must be >= 0");
  if (!(effective_rest_length() > 0.0)) throw ConfigError("PendulumParams: rest length must be > 0");
  if (x1_initial[1] != 0.0) {
    throw ConfigError("PendulumParams: mass 1 moves along the x-axis, its initial y must be 0");
  }
}

std::pair<Eigen::Vector2d, Eigen::Vector2d> spring_gradient(const Eigen::Vector2d& x1,
                                                            const Eigen::Vector2d& x2, double k,
                                                            double rest_length) {
  const Eigen::Vector2d d = x2 - x1;
  const double l = d.norm();
  if (l < kCoincidenceTol) {
    throw SingularConfigurationError("spring_gradient: endpoints coincide");
  }
  const Eigen::Vector2d grad_x2 = k * (l - rest_length) * (d / l);
  return {-grad_x2, grad_x2};
}

double spring_potential(const Eigen::Vector2d& x1, const Eigen::Vector2d& x2, double k,
                        double rest_length) {
  const double l = (x2 - x1).norm();
  return 0.5 * k * (l - rest_length) * (l - rest_length);
}

ControlProblem pendulum_problem(const PendulumParams& params, double alpha, double final_time) {
  params.validate();
  const double m2 = params.m2;
  const double k = params.k;
  const double a = params.a;
  const double lo = params.effective_rest_length();

  ControlProblem p;
  p.state_dim = 5;
  p.control_dim = 1;

  p.dynamics = [m2, k, a, lo](const Eigen::VectorXd& z, const Eigen::VectorXd& u) {
    const SpringGeometry geo(z);
    const Eigen::Vector2d g = k * (geo.l - lo) * geo.n;  // grad_{x2} U
    Eigen::VectorXd f(5);
    f << u[0], z[3], z[4], -g[0] / m2, -g[1] / m2 - a;
    return f;
  };

  p.state_jacobian = [m2, k, lo](const Eigen::VectorXd& z, const Eigen::VectorXd&) {
    const SpringGeometry geo(z);
    const Eigen::Matrix2d nn = geo.n * geo.n.transpose();
    const Eigen::Matrix2d hess =
        k * nn + k * (geo.l - lo) / geo.l * (Eigen::Matrix2d::Identity() - nn);
    const Eigen::Matrix<double, 2, 3> dg = hess * kChain;
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(5, 5);
    j(1, 3) = 1.0;
    j(2, 4) = 1.0;
    j.block<1, 3>(3, 0) = -dg.row(0) / m2;
    j.block<1, 3>(4, 0) = -dg.row(1) / m2;
    return j;
  };

  p.control_jacobian = [](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(5, 1);
    j(0, 0) = 1.0;
    return j;
  };

  // sum_k lambda_k d^2 f_k/dz dz: only the spring-force rows are nonlinear.
  // With c = -(lambda_3, lambda_4)/m2 the contraction over w = (z1-z0, z2)
  // is (k lo / l^2)[c n' + n c' + (c.n)(I - 3 n n')], pushed through the
  // linear map w(z).
  p.state_hessian_contraction = [m2, k, lo](const Eigen::VectorXd& z, const Eigen::VectorXd&,
                                            const Eigen::VectorXd& lambda) {
    const SpringGeometry geo(z);
    const Eigen::Vector2d c(-lambda[3] / m2, -lambda[4] / m2);
    const double cn = c.dot(geo.n);
    const Eigen::Matrix2d nn = geo.n * geo.n.transpose();
    const Eigen::Matrix2d contraction =
        (k * lo / (geo.l * geo.l)) *
        (c * geo.n.transpose() + geo.n * c.transpose() +
         cn * (Eigen::Matrix2d::Identity() - 3.0 * nn));
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(5, 5);
    s.block<3, 3>(0, 0) = kChain.transpose() * contraction * kChain;
    return s;
  };

  p.output_weight = Eigen::MatrixXd::Zero(5, 5);
  p.output_weight(2, 2) = 1.0;
  p.input_weight = Eigen::MatrixXd::Identity(1, 1);
  p.target_state = Eigen::VectorXd::Zero(5);
  p.target_state[2] = params.x_target;
  p.initial_state = Eigen::VectorXd(5);
  p.initial_state << params.x1_initial[0], params.x2_initial[0], params.x2_initial[1], 0.0, 0.0;
  p.alpha = alpha;
  p.final_time = final_time;
  return p;
}

}  // namespace ocpstab
