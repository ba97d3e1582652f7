#include "ocpstab/linear_discrete.hpp"

#include <cmath>
#include <string>

#include "ocpstab/banded.hpp"
#include "ocpstab/errors.hpp"

namespace ocpstab {

namespace {

double gamma_dt_of(const LinearOCPParams& p, double dt) {
  return dt * std::sqrt(p.b * p.b / (p.m * p.m) + 1.0 / (p.alpha * p.m * p.m));
}

}  // namespace

MPCoefficients assemble_mp(const LinearOCPParams& p, double dt) {
  if (!(dt > 0.0)) throw ConfigError("assemble_mp: dt must be > 0");
  return MPCoefficients{p.b / p.m + 2.0 / dt, p.b / p.m - 2.0 / dt, 1.0 / (p.alpha * p.m * p.m)};
}

IECoefficients assemble_ie(const LinearOCPParams& p, double dt) {
  if (!(dt > 0.0)) throw ConfigError("assemble_ie: dt must be > 0");
  return IECoefficients{p.b / p.m + 1.0 / dt, p.b / p.m - 1.0 / dt, 1.0 / dt,
                        1.0 / (p.alpha * p.m * p.m)};
}

PropagationForm propagation_mp(const LinearOCPParams& params, double dt) {
  const auto [p, q, s] = assemble_mp(params, dt);
  const double den = s + p * q;
  if (std::abs(den) < 1e-12 * std::max(std::abs(s), std::abs(p * q))) {
    throw SingularPropagationError("propagation_mp: s + p q = 0 (gamma*dt = 2)", gamma_dt_of(params, dt));
  }
  PropagationForm form;
  form.scheme = Scheme::midpoint();
  const double f = -1.0 / den;
  form.transition << f * (s + q * q), f * (-s * (p - q)),
                     f * (-(p - q)),  f * (s + p * p);
  form.affine << -2.0 / den * (q * params.a - s * params.vt),
                 -2.0 / den * (params.a + p * params.vt);
  return form;
}

PropagationForm propagation_ie(const LinearOCPParams& params, double dt) {
  const auto [ps, qs, r, s] = assemble_ie(params, dt);
  const double den = s + ps * qs;
  if (std::abs(den) < 1e-12 * std::max(std::abs(s), std::abs(ps * qs))) {
    throw SingularPropagationError("propagation_ie: s + p* q* = 0 (gamma*dt = 1)", gamma_dt_of(params, dt));
  }
  PropagationForm form;
  form.scheme = Scheme::implicit_euler();
  const double f = -r / den;
  form.transition << f * (-qs), f * (-s),
                     f * (-1.0), f * ps;
  form.affine << -1.0 / den * (qs * params.a - s * params.vt),
                 -1.0 / den * (params.a + ps * params.vt);
  return form;
}

ScalarTrajectory solve_bvp(const LinearOCPParams& params, const TimeGrid& grid, const Scheme& scheme) {
  params.validate();
  const int n_steps = grid.step_count();
  const double dt = grid.dt();
  const double tau = scheme.tau();
  const double bm = params.b / params.m;
  const double s = 1.0 / (params.alpha * params.m * params.m);

  // Unknowns interleaved [v_0, lambda_0, v_1, lambda_1, ...]; two stencil
  // rows per interval plus the two boundary rows give bandwidth 2.
  const int n_unknowns = 2 * (n_steps + 1);
  BandedMatrix mat(n_unknowns, 2, 2);
  std::vector<double> rhs(n_unknowns, 0.0);

  mat.at(0, 0) = 1.0;
  rhs[0] = params.v0;

  for (int n = 1; n <= n_steps; ++n) {
    const int vp = 2 * (n - 1), lp = vp + 1, vn = 2 * n, ln = vn + 1;
    // adjoint: (l_{n-1} - l_n)/dt - (v_{n-tau} - vt) + (b/m) l_{n-tau} = 0
    const int ra = 2 * n - 1;
    mat.add(ra, vp, -tau);
    mat.add(ra, vn, -(1.0 - tau));
    mat.add(ra, lp, 1.0 / dt + tau * bm);
    mat.add(ra, ln, -1.0 / dt + (1.0 - tau) * bm);
    rhs[ra] = -params.vt;
    // state: (v_n - v_{n-1})/dt + (b/m) v_{n-tau} + s l_{n-tau} + a = 0
    const int rs = 2 * n;
    mat.add(rs, vp, -1.0 / dt + tau * bm);
    mat.add(rs, vn, 1.0 / dt + (1.0 - tau) * bm);
    mat.add(rs, lp, tau * s);
    mat.add(rs, ln, (1.0 - tau) * s);
    rhs[rs] = -params.a;
  }
  mat.at(n_unknowns - 1, n_unknowns - 1) = 1.0;

  std::vector<double> sol;
  try {
    BandedLU lu(std::move(mat));
    sol = lu.solve(rhs);
  } catch (const SolverError&) {
    throw SolverError("solve_bvp: singular global system", gamma_dt_of(params, dt));
  }
  for (double x : sol) {
    if (!std::isfinite(x)) {
      throw SolverError("solve_bvp: non-finite solution", gamma_dt_of(params, dt));
    }
  }

  ScalarTrajectory traj(grid);
  for (int n = 0; n <= n_steps; ++n) {
    traj.v[n] = sol[2 * n];
    traj.lambda[n] = sol[2 * n + 1];
    traj.u[n] = -traj.lambda[n] / (params.alpha * params.m);
  }
  // the boundary rows are exact by construction; pivoting may smear them by
  // a few ulps, so restore them
  traj.v[0] = params.v0;
  traj.lambda[n_steps] = 0.0;
  traj.u[n_steps] = 0.0;
  return traj;
}

PropagationRun propagate(const PropagationForm& form, const Eigen::Vector2d& z0, int steps) {
  PropagationRun run;
  run.z.reserve(steps + 1);
  run.z.push_back(z0);
  Eigen::Vector2d z = z0;
  for (int n = 1; n <= steps; ++n) {
    z = form.transition * z + form.affine;
    if (z.cwiseAbs().maxCoeff() > 1e300 || !z.allFinite()) {
      run.blowup_step = n;
      break;
    }
    run.z.push_back(z);
  }
  return run;
}

}  // namespace ocpstab
