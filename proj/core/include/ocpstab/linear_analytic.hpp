#pragma once

namespace ocpstab {

/// Parameters of the scalar propelled-body problem: drive a mass m with
/// drag coefficient b under gravity a from velocity v0 to a target vt over
/// the horizon T, with control-cost weight alpha.
struct LinearOCPParams {
  double m = 1.0;
  double b = 1.0;
  double a = 1.0;
  double v0 = 0.0;
  double vt = 20.0;
  double T = 10.0;
  double alpha = 1e-2;

  void validate() const;
};

/// Closed-form solution constants. The evaluators use the end-scaled
/// constant c1_scaled = c1 * exp(gamma*T) so no exponential ever exceeds
/// exp(0) in magnitude, which keeps the evaluation finite for arbitrarily
/// stiff gamma*T.
struct AnalyticSolution {
  double gamma;
  double v_p;
  double lambda_p;
  double c1;
  double c2;
  double c1_scaled;

  double m, b, alpha, T;

  double v(double t) const;
  double lambda(double t) const;
  double u(double t) const;  // u = -lambda/(alpha*m), from grad_u H = 0
};

struct AnalyticPoint {
  double v;
  double lambda;
  double u;
};

AnalyticSolution derive_constants(const LinearOCPParams& params);

/// Evaluates (v, lambda, u) at a time t in [0, T]; throws DomainError outside.
AnalyticPoint eval_analytic(const AnalyticSolution& sol, const LinearOCPParams& params, double t);

}  // namespace ocpstab
