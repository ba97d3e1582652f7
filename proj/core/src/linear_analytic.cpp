#include "ocpstab/linear_analytic.hpp"

#include <cmath>
#include <string>

#include "ocpstab/errors.hpp"

namespace ocpstab {

void LinearOCPParams::validate() const {
  if (!(m > 0.0)) throw ConfigError("LinearOCPParams: m must be > 0");
  if (!(b > 0.0)) throw ConfigError("LinearOCPParams: b must be > 0");
  if (!(a >= 0.0)) throw ConfigError("LinearOCPParams: a must be >= 0");
  if (!(T > 0.0)) throw ConfigError("LinearOCPParams: T must be > 0");
  if (!(alpha > 0.0)) throw ConfigError("LinearOCPParams: alpha must be > 0");
}

AnalyticSolution derive_constants(const LinearOCPParams& p) {
  p.validate();
  AnalyticSolution s{};
  s.m = p.m;
  s.b = p.b;
  s.alpha = p.alpha;
  s.T = p.T;

  const double g = std::sqrt(p.b * p.b / (p.m * p.m) + 1.0 / (p.alpha * p.m * p.m));
  const double g2 = g * g;
  s.gamma = g;
  s.v_p = (p.vt - p.alpha * p.b * p.m * p.a) / (p.alpha * p.m * p.m * g2);
  s.lambda_p = -(p.b * p.vt + p.m * p.a) / (p.m * g2);

  // c1_scaled = c1 * e^{gamma T}: divide numerator and denominator of the
  // textbook expression by e^{gamma T} so only decaying exponentials appear.
  const double em = std::exp(-g * p.T);
  const double bp = p.b + p.m * g;
  const double bm = p.b - p.m * g;
  const double dv = p.m * (p.v0 - s.v_p);
  s.c1_scaled = (dv * em + bp * s.lambda_p) / (bm * em * em - bp);
  s.c1 = s.c1_scaled * em;
  s.c2 = (dv - bm * s.c1) / bp;
  return s;
}

double AnalyticSolution::lambda(double t) const {
  // c1*e^{gamma t} = c1_scaled * e^{gamma (t - T)}, exponent <= 0 on [0, T]
  return c1_scaled * std::exp(gamma * (t - T)) + c2 * std::exp(-gamma * t) + lambda_p;
}

double AnalyticSolution::v(double t) const {
  const double bm_over_m = b / m;
  return c1_scaled * std::exp(gamma * (t - T)) * (bm_over_m - gamma) +
         c2 * std::exp(-gamma * t) * (bm_over_m + gamma) + v_p;
}

double AnalyticSolution::u(double t) const { return -lambda(t) / (alpha * m); }

AnalyticPoint eval_analytic(const AnalyticSolution& sol, const LinearOCPParams& params, double t) {
  if (t < 0.0 || t > params.T) {
    throw DomainError("eval_analytic: t = " + std::to_string(t) + " outside [0, T]");
  }
  return AnalyticPoint{sol.v(t), sol.lambda(t), sol.u(t)};
}

}  // namespace ocpstab
