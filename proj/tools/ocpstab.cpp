// ocpstab: solve time-discretized optimal control problems with the MP/iE
// schemes and analyze the stability and oscillation behavior of the
// discretization. Emits CSV trajectories and JSON summaries; see --help of
// each subcommand for the exact column schemas.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <json.hpp>

#include "ocpstab/errors.hpp"
#include "ocpstab/hbvp.hpp"
#include "ocpstab/linear_analytic.hpp"
#include "ocpstab/linear_discrete.hpp"
#include "ocpstab/pendulum.hpp"
#include "ocpstab/stability.hpp"

using nlohmann::json;

namespace {

// 17 significant digits, locale-independent; round-trips any double.
std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json error_json(const std::string& type, const std::string& message) {
  return json{{"error", {{"type", type}, {"message", message}}}};
}

struct CliError {
  int exit_code;
  json payload;
};

[[noreturn]] void fail_config(const std::string& msg) { throw CliError{2, error_json("config", msg)}; }
[[noreturn]] void fail_solver(const std::string& msg) { throw CliError{3, error_json("solver", msg)}; }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_config("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    fail_config("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

double require_number(const json& j, const std::string& key) {
  if (!j.contains(key) || !j[key].is_number()) fail_config("config field '" + key + "' missing or not a number");
  return j[key].get<double>();
}

ocpstab::TimeGrid grid_from_config(const json& j, double final_time) {
  const bool has_n = j.contains("N");
  const bool has_dt = j.contains("dt");
  if (has_n == has_dt) fail_config("config must provide exactly one of 'N' or 'dt'");
  try {
    if (has_n) {
      if (!j["N"].is_number_integer()) fail_config("config field 'N' must be an integer");
      return ocpstab::make_grid(final_time, j["N"].get<int>());
    }
    return ocpstab::TimeGrid::from_step(final_time, require_number(j, "dt"));
  } catch (const ocpstab::ConfigError& e) {
    fail_config(e.what());
  }
}

ocpstab::Scheme scheme_from_string(const std::string& s) {
  if (s == "mp") return ocpstab::Scheme::midpoint();
  if (s == "ie") return ocpstab::Scheme::implicit_euler();
  char* end = nullptr;
  const double tau = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') fail_config("scheme must be 'mp', 'ie' or a tau value");
  try {
    return ocpstab::Scheme::from_tau(tau);
  } catch (const ocpstab::ConfigError& e) {
    fail_config(e.what());
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_config("cannot open output file: " + path);
  return out;
}

json stability_report_json(const ocpstab::StabilityReport& rep) {
  json j;
  j["gamma"] = rep.gamma;
  j["gamma_dt"] = rep.gamma_dt;
  if (std::isfinite(rep.e1)) {
    j["e1"] = rep.e1;
    j["e2"] = rep.e2;
    j["spectral_radius"] = rep.spectral_radius;
  } else {
    j["e1"] = nullptr;
    j["e2"] = nullptr;
    j["spectral_radius"] = nullptr;
  }
  j["alpha_th"] = std::isfinite(rep.alpha_th) ? json(rep.alpha_th) : json(nullptr);
  j["classification"] = ocpstab::to_string(rep.classification);
  j["blowup_log10_distance"] = rep.blowup_log10_distance;
  j["scheme"] = rep.scheme.name();
  return j;
}

int cmd_solve_linear(const std::string& config_path, const std::string& scheme_str,
                     const std::string& out_path, const std::string& summary_path) {
  const json cfg = load_json(config_path);
  ocpstab::LinearOCPParams params;
  params.m = require_number(cfg, "m");
  params.b = require_number(cfg, "b");
  params.a = require_number(cfg, "a");
  params.v0 = require_number(cfg, "v0");
  params.vt = require_number(cfg, "vt");
  params.T = require_number(cfg, "T");
  params.alpha = require_number(cfg, "alpha");
  try {
    params.validate();
  } catch (const ocpstab::ConfigError& e) {
    fail_config(e.what());
  }
  const ocpstab::TimeGrid grid = grid_from_config(cfg, params.T);
  const ocpstab::Scheme scheme = scheme_from_string(scheme_str);

  ocpstab::ScalarTrajectory traj(grid);
  try {
    traj = ocpstab::solve_bvp(params, grid, scheme);
  } catch (const ocpstab::SolverError& e) {
    fail_solver(e.what());
  }
  const ocpstab::AnalyticSolution exact = ocpstab::derive_constants(params);

  auto out = open_output(out_path);
  out << "t,v,lambda,u,v_exact,lambda_exact,u_exact,abs_err_v\n";
  double max_err_v = 0.0, max_err_lambda = 0.0, max_err_u = 0.0;
  for (int n = 0; n <= grid.step_count(); ++n) {
    const double t = grid.node(n);
    const auto ref = ocpstab::eval_analytic(exact, params, std::min(t, params.T));
    const double err_v = std::abs(traj.v[n] - ref.v);
    max_err_v = std::max(max_err_v, err_v);
    max_err_lambda = std::max(max_err_lambda, std::abs(traj.lambda[n] - ref.lambda));
    max_err_u = std::max(max_err_u, std::abs(traj.u[n] - ref.u));
    out << fmt17(t) << ',' << fmt17(traj.v[n]) << ',' << fmt17(traj.lambda[n]) << ','
        << fmt17(traj.u[n]) << ',' << fmt17(ref.v) << ',' << fmt17(ref.lambda) << ','
        << fmt17(ref.u) << ',' << fmt17(err_v) << '\n';
  }

  json summary;
  summary["config"] = {{"m", params.m}, {"b", params.b}, {"a", params.a}, {"v0", params.v0},
                       {"vt", params.vt}, {"T", params.T}, {"alpha", params.alpha},
                       {"N", grid.step_count()}};
  summary["scheme"] = scheme.name();
  summary["grid"] = {{"T", grid.final_time()}, {"N", grid.step_count()}, {"dt", grid.dt()}};
  summary["max_abs_err_v"] = max_err_v;
  summary["max_abs_err_lambda"] = max_err_lambda;
  summary["max_abs_err_u"] = max_err_u;
  summary["oscillation_index"] = ocpstab::oscillation_index(traj.u);
  if (scheme.is_midpoint() || scheme.is_implicit_euler()) {
    summary["stability"] = stability_report_json(ocpstab::stability_report(params, grid.dt(), scheme));
  } else {
    summary["stability"] = nullptr;
  }
  auto sum_out = open_output(summary_path);
  sum_out << summary.dump(2) << '\n';
  return 0;
}

int cmd_stability(double m, double b, double alpha, double dt, const std::string& scheme_str) {
  ocpstab::LinearOCPParams params;
  params.m = m;
  params.b = b;
  params.alpha = alpha;
  const ocpstab::Scheme scheme = scheme_from_string(scheme_str);
  if (!scheme.is_midpoint() && !scheme.is_implicit_euler()) {
    fail_config("stability analysis requires scheme mp or ie");
  }
  if (!(dt > 0.0)) fail_config("dt must be > 0");
  try {
    params.validate();
    const auto rep = ocpstab::stability_report(params, dt, scheme);
    std::cout << stability_report_json(rep).dump(2) << '\n';
  } catch (const ocpstab::ConfigError& e) {
    fail_config(e.what());
  }
  return 0;
}

int cmd_sweep(const ocpstab::SweepProblem& problem, const std::string& scheme_str, double alpha_min,
              double alpha_max, double dt_min, double dt_max, int n, int jobs,
              const std::string& out_path) {
  const ocpstab::Scheme scheme = scheme_from_string(scheme_str);
  if (!scheme.is_midpoint() && !scheme.is_implicit_euler()) {
    fail_config("sweep requires scheme mp or ie");
  }
  std::vector<double> alpha_grid, dt_grid;
  try {
    alpha_grid = ocpstab::log_spaced(alpha_min, alpha_max, n);
    dt_grid = ocpstab::log_spaced(dt_min, dt_max, n);
  } catch (const ocpstab::ConfigError& e) {
    fail_config(e.what());
  }
  const auto diag = ocpstab::phase_sweep(problem, alpha_grid, dt_grid, scheme, jobs);

  auto out = open_output(out_path);
  out << "alpha,dt,class_numeric,class_analytic,osc_index,alpha_th\n";
  for (size_t j = 0; j < diag.dt_grid.size(); ++j) {
    for (size_t i = 0; i < diag.alpha_grid.size(); ++i) {
      const size_t c = diag.cell(j, i);
      out << fmt17(diag.alpha_grid[i]) << ',' << fmt17(diag.dt_grid[j]) << ','
          << ocpstab::to_string(diag.numeric[c]) << ',' << ocpstab::to_string(diag.analytic[c])
          << ',' << fmt17(diag.osc_index[c]) << ',' << fmt17(diag.alpha_th[j]) << '\n';
    }
  }
  return 0;
}

int cmd_pendulum(const std::string& config_path, std::optional<double> alpha_override,
                 const std::string& out_path, const std::string& summary_path,
                 double continuation_start) {
  const json cfg = load_json(config_path);
  ocpstab::PendulumParams params;
  params.m1 = require_number(cfg, "m1");
  params.m2 = require_number(cfg, "m2");
  params.k = require_number(cfg, "k");
  params.a = require_number(cfg, "a");
  params.x_target = require_number(cfg, "x_target");
  if (cfg.contains("l0")) params.rest_length = require_number(cfg, "l0");
  const double final_time = require_number(cfg, "T");
  double alpha = alpha_override.value_or(0.0);
  if (!alpha_override) alpha = require_number(cfg, "alpha");
  if (!(alpha > 0.0)) fail_config("alpha must be > 0");
  if (!(final_time > 0.0)) fail_config("T must be > 0");
  const ocpstab::TimeGrid grid = grid_from_config(cfg, final_time);

  ocpstab::ControlProblem problem;
  try {
    problem = ocpstab::pendulum_problem(params, alpha, final_time);
  } catch (const ocpstab::ConfigError& e) {
    fail_config(e.what());
  }

  ocpstab::SolveReport report;
  ocpstab::VectorTrajectory traj(grid, 5, 1);
  try {
    traj = ocpstab::alpha_continuation_solve(problem, grid, ocpstab::Scheme::midpoint(), {},
                                             std::max(continuation_start, alpha), &report);
  } catch (const ocpstab::ConvergenceError& e) {
    json err = error_json("solver", e.what());
    err["error"]["residual_history"] = e.residual_history;
    throw CliError{3, err};
  } catch (const ocpstab::SolverError& e) {
    fail_solver(e.what());
  }

  auto out = open_output(out_path);
  out << "t,x1,x2x,x2y,v2x,v2y,u,lambda_norm\n";
  std::vector<double> u_seq(grid.node_count());
  for (int n = 0; n <= grid.step_count(); ++n) {
    u_seq[n] = traj.u[n][0];
    out << fmt17(grid.node(n)) << ',' << fmt17(traj.x[n][0]) << ',' << fmt17(traj.x[n][1]) << ','
        << fmt17(traj.x[n][2]) << ',' << fmt17(traj.x[n][3]) << ',' << fmt17(traj.x[n][4]) << ','
        << fmt17(traj.u[n][0]) << ',' << fmt17(traj.lambda[n].norm()) << '\n';
  }

  json summary;
  summary["config"] = {{"m1", params.m1}, {"m2", params.m2}, {"k", params.k}, {"a", params.a},
                       {"x_target", params.x_target}, {"T", final_time}, {"alpha", alpha},
                       {"l0", params.effective_rest_length()}, {"N", grid.step_count()}};
  summary["scheme"] = "mp";
  summary["newton_iterations"] = report.iterations;
  summary["final_residual"] = report.final_residual;
  summary["oscillation_index_u"] = ocpstab::oscillation_index(u_seq);
  auto sum_out = open_output(summary_path);
  sum_out << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discretized optimal-control stability workbench"};
  app.require_subcommand(1);

  // solve-linear
  std::string sl_config, sl_scheme, sl_out, sl_summary;
  auto* solve_linear = app.add_subcommand(
      "solve-linear",
      "Solve the linear propelled-body BVP; CSV columns: "
      "t,v,lambda,u,v_exact,lambda_exact,u_exact,abs_err_v");
  solve_linear->add_option("--config", sl_config, "JSON config {m,b,a,v0,vt,T,alpha, N|dt}")->required();
  solve_linear->add_option("--scheme", sl_scheme, "mp | ie | tau in [0,1/2]")->required();
  solve_linear->add_option("--out", sl_out, "trajectory CSV path")->required();
  solve_linear->add_option("--summary", sl_summary, "summary JSON path")->required();

  // stability
  double st_m = 1.0, st_b = 1.0, st_alpha = 1e-2, st_dt = 0.1;
  std::string st_scheme = "mp";
  auto* stability = app.add_subcommand("stability", "Analytic stability report as JSON on stdout");
  stability->add_option("--m", st_m, "mass")->required();
  stability->add_option("--b", st_b, "drag coefficient")->required();
  stability->add_option("--alpha", st_alpha, "control-cost weight")->required();
  stability->add_option("--dt", st_dt, "time step")->required();
  stability->add_option("--scheme", st_scheme, "mp | ie")->required();

  // sweep
  ocpstab::SweepProblem sw_problem;
  std::string sw_scheme = "mp", sw_out;
  double sw_alpha_min = 1e-5, sw_alpha_max = 1.0, sw_dt_min = 1e-2, sw_dt_max = 1.0;
  int sw_n = 64, sw_jobs = 0;
  auto* sweep = app.add_subcommand(
      "sweep",
      "Phase-diagram sweep over (alpha, dt); CSV columns: "
      "alpha,dt,class_numeric,class_analytic,osc_index,alpha_th (dt-major row order)");
  sweep->add_option("--scheme", sw_scheme, "mp | ie")->required();
  sweep->add_option("--alpha-min", sw_alpha_min, "alpha grid lower end");
  sweep->add_option("--alpha-max", sw_alpha_max, "alpha grid upper end");
  sweep->add_option("--dt-min", sw_dt_min, "dt grid lower end");
  sweep->add_option("--dt-max", sw_dt_max, "dt grid upper end");
  sweep->add_option("--n", sw_n, "grid points per axis (default 64)");
  sweep->add_option("--jobs", sw_jobs, "worker threads, 0 = hardware parallelism");
  sweep->add_option("--out", sw_out, "phase CSV path")->required();
  sweep->add_option("--m", sw_problem.m, "mass (default 1)");
  sweep->add_option("--b", sw_problem.b, "drag coefficient (default 1)");
  sweep->add_option("--a", sw_problem.a, "gravity (default 1)");
  sweep->add_option("--v0", sw_problem.v0, "initial velocity (default 0)");
  sweep->add_option("--vt", sw_problem.vt, "target velocity (default 20)");
  sweep->add_option("--T", sw_problem.T, "horizon (default 10)");

  // pendulum
  std::string pd_config, pd_out, pd_summary;
  double pd_alpha = -1.0, pd_continuation_start = 1.0;
  auto* pendulum = app.add_subcommand(
      "pendulum",
      "Solve the inverted elastic pendulum (MP scheme, continuation in alpha); CSV columns: "
      "t,x1,x2x,x2y,v2x,v2y,u,lambda_norm");
  pendulum->add_option("--config", pd_config,
                       "JSON config {m1,m2,k,a,x_target,T,alpha, N|dt, l0 (optional)}")->required();
  pendulum->add_option("--alpha", pd_alpha, "override the config's control-cost weight");
  pendulum->add_option("--out", pd_out, "trajectory CSV path")->required();
  pendulum->add_option("--summary", pd_summary, "summary JSON path")->required();
  pendulum->add_option("--continuation-start", pd_continuation_start,
                       "anchor alpha of the continuation (default 1.0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_linear->parsed()) return cmd_solve_linear(sl_config, sl_scheme, sl_out, sl_summary);
    if (stability->parsed()) return cmd_stability(st_m, st_b, st_alpha, st_dt, st_scheme);
    if (sweep->parsed()) {
      return cmd_sweep(sw_problem, sw_scheme, sw_alpha_min, sw_alpha_max, sw_dt_min, sw_dt_max,
                       sw_n, sw_jobs, sw_out);
    }
    if (pendulum->parsed()) {
      std::optional<double> alpha_override;
      if (pd_alpha > 0.0) alpha_override = pd_alpha;
      return cmd_pendulum(pd_config, alpha_override, pd_out, pd_summary, pd_continuation_start);
    }
  } catch (const CliError& e) {
    std::cerr << e.payload.dump() << '\n';
    return e.exit_code;
  } catch (const ocpstab::ConfigError& e) {
    std::cerr << error_json("config", e.what()).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("solver", e.what()).dump() << '\n';
    return 3;
  }
  return 0;
}
