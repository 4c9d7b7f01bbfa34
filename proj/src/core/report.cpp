/******************************************************************************
 * Copyright 2026 The DPTCO Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include "dptco/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "dptco/errors.hpp"
#include "dptco/svg.hpp"

namespace dptco {

using Json = nlohmann::json;

bool RunResult::all_monitors_pass() const {
  for (const auto& m : monitors)
    if (!m.pass) return false;
  return true;
}

bool VerifyResult::all_pass() const {
  for (const auto& m : monitors)
    if (!m.pass) return false;
  return true;
}

namespace {

Json gain_json(const GainFunction& g) {
  Json j{{"family", gain_family_name(g.family())}};
  if (g.family() != GainFamily::kDc2) j["params"] = g.params();
  return j;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r)
    rows.push_back(Vector(m.row(r).begin(), m.row(r).end()));
  return rows;
}

Json monitor_json(const MonitorReport& r) {
  Json extras = Json::object();
  for (const auto& [k, v] : r.extras) extras[k] = v;
  return Json{{"name", r.name},
              {"pass", r.pass},
              {"max_ratio", r.max_ratio},
              {"first_violation_t", r.first_violation_t},
              {"extras", extras}};
}

Json criterion_json(const CriterionEntry& e) {
  Json j{{"name", e.name},
         {"pass", e.report.pass},
         {"acknowledged", e.acknowledged},
         {"worst_margin", e.report.worst_margin},
         {"worst_s", e.report.worst_s},
         {"detail", e.detail}};
  if (e.report.coupling_checked) {
    j["coupling_pass"] = e.report.coupling_pass;
    j["coupling_worst_margin"] = e.report.coupling_worst_margin;
    j["coupling_worst_s"] = e.report.coupling_worst_s;
  }
  return j;
}

Json optimum_obj(const OptimumCertificate& c) {
  return Json{{"z", c.z}, {"grad_norm", c.grad_norm}, {"iterations", c.iterations}};
}

Json constants_json(const Scenario& sc) {
  const CoupledSystem& sys = sc.sys;
  Json j{{"c1", sc.gen_constants.c1},
         {"c2", sc.gen_constants.c2},
         {"c3", sc.gen_constants.c3},
         {"c_star", sc.gen_constants.c_star},
         {"lambda2", sc.lambda2},
         {"lambda_n", sc.lambda_n},
         {"rho", sc.cost_constants.rho},
         {"varrho", sc.cost_constants.varrho},
         {"cost_constants_analytic", sc.cost_constants.analytic},
         {"alpha", gain_json(sys.alpha)},
         {"alpha_requested", gain_json(sc.alpha_requested)},
         {"alpha_raised", sc.alpha_raised}};
  if (sys.chain) {
    const ChainControllerConfig& c = *sys.chain;
    j["chain"] = Json{{"m", c.m},
                      {"K", c.K},
                      {"P", matrix_json(c.P)},
                      {"v1", c.v1},
                      {"v2", c.v2},
                      {"v", c.v},
                      {"alpha_x", gain_json(c.alpha_x)},
                      {"alpha_s", gain_json(c.alpha_s)},
                      {"alpha_s_override", c.alpha_s_override},
                      {"psi", psi_kind_name(c.psi)},
                      {"psi_scale", c.psi_scale}};
  }
  if (sys.strict) {
    const StrictFeedbackConfig& s = *sys.strict;
    j["strict_feedback"] = Json{{"m", s.m},
                                {"l", s.l},
                                {"L", s.L},
                                {"c", s.c},
                                {"upsilon", s.upsilon},
                                {"sigma", s.sigma},
                                {"sigma_prime", s.sigma_prime},
                                {"raw_gains", s.raw_gains},
                                {"alpha_xi", gain_json(s.alpha_xi)}};
  }
  return j;
}

std::vector<double> agent_series(const Trajectory& traj,
                                 const std::function<double(const Vector&)>& f) {
  std::vector<double> out(traj.size());
  for (std::size_t r = 0; r < traj.size(); ++r) out[r] = f(traj.states[r]);
  return out;
}

void write_plots(const RunResult& res, const std::filesystem::path& dir) {
  const Scenario& sc = res.scenario;
  const CoupledSystem& sys = sc.sys;
  const Trajectory& traj = res.integration.traj;
  const Vector& z = res.optimum.z;
  const std::size_t N = sys.n_agents(), m = sys.costs.dim();

  const Vector er = er_norms(traj, sys, z);
  const Vector env = er_envelope(traj, sc, er.empty() ? 0.0 : er[0]);
  PlotPanel p1{"Generator error |e_r(t)| and envelope", "t", "|e_r|", true,
               {{"|e_r|", traj.times, er, false},
                {"envelope", traj.times, env, true}}};
  write_svg((dir / "er_envelope.svg").string(), {p1});

  std::vector<PlotPanel> panels;
  PlotPanel track;
  track.x_label = "t";
  track.log_y = true;
  for (std::size_t i = 0; i < N; ++i) {
    const Vector& off = sys.plant == PlantKind::kNone ? Vector{}
                                                      : sys.agents[i].offset;
    const std::size_t base =
        sys.plant == PlantKind::kNone ? i * m : sys.x_offset(i);
    track.series.push_back(
        {"agent " + std::to_string(i), traj.times,
         agent_series(traj, [&](const Vector& y) {
           double d = 0.0;
           for (std::size_t k = 0; k < m; ++k) {
             const double e = y[base + k] - z[k] - (off.empty() ? 0.0 : off[k]);
             d += e * e;
           }
           return std::sqrt(d);
         }),
         false});
  }
  track.title = sys.plant == PlantKind::kNone
                    ? "Generator outputs |varpi^i - z*|"
                    : "Tracking error |y^i - z* - omega^i|";
  track.y_label = "error";
  panels.push_back(track);
  if (sys.plant == PlantKind::kStrictFeedback) {
    PlotPanel st{"Adaptive estimate and upper stages", "t", "value", false, {}};
    const std::size_t n = sys.n;
    for (std::size_t i = 0; i < N; ++i) {
      const std::size_t co = sys.ctrl_offset(i), xo = sys.x_offset(i);
      st.series.push_back({"theta_hat " + std::to_string(i), traj.times,
                           agent_series(traj, [&](const Vector& y) { return y[co]; }),
                           false});
      for (int q = 2; q <= sys.order && q <= 3; ++q)
        st.series.push_back(
            {"|x" + std::to_string(q) + "| " + std::to_string(i), traj.times,
             agent_series(traj,
                          [&](const Vector& y) {
                            return norm2(std::span<const double>(y).subspan(
                                xo + (q - 1) * n, n));
                          }),
             true});
    }
    panels.push_back(st);
  }
  write_svg((dir / "tracking.svg").string(), panels);
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  const auto start = std::chrono::steady_clock::now();
  RunResult res;
  res.scenario = sc;
  res.optimum = optimum_oracle(sc.sys.costs, sc.optimum_tol, sc.z_init);
  res.integration = integrate(sc.sys, sc.solver);
  const Trajectory& traj = res.integration.traj;
  res.monitors = evaluate_monitors(sc, traj, res.optimum.z);
  res.metrics = endpoint_metrics(sc, traj, res.optimum.z);
  if (sc.sys.strict) {
    const std::size_t per = sc.sys.derived_per_agent();
    double h = 0.0, theta = 0.0;
    for (std::size_t i = 0; i < sc.sys.n_agents(); ++i) {
      h = std::max(h, default_invariant_radius(traj.derived[0][i * per + sc.sys.n + 1]));
      theta = std::max(theta, std::fabs(sc.sys.agents[i].theta_true));
    }
    for (const auto& req : sc.monitors)
      if (req.name == "invariant_set" && req.h > 0) h = req.h;
    res.recipe_h = h;
    res.recipe = check_recipe(*sc.sys.strict, theta, h);
  }
  res.duration_s = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return res;
}

std::string manifest_json(const RunResult& r) {
  const Scenario& sc = r.scenario;
  const PrescribedClock& clk = sc.sys.clock;
  Json j;
  j["scenario"] = Json{{"name", sc.name},
                       {"source", sc.source},
                       {"hash", sc.hash},
                       {"seed", sc.seed},
                       {"t0", clk.t0()},
                       {"T", clk.horizon()},
                       {"guard_frac", clk.guard_frac()},
                       {"plant", plant_kind_name(sc.sys.plant)},
                       {"agents", sc.sys.n_agents()}};
  j["constants"] = constants_json(sc);
  Json crit = Json::array();
  for (const auto& c : sc.criteria) crit.push_back(criterion_json(c));
  j["criteria"] = crit;
  j["acknowledge_criteria_override"] = sc.acknowledge_override;
  j["overrides_used"] = sc.overrides_used;
  j["warnings"] = sc.warnings;
  j["optimum"] = optimum_obj(r.optimum);
  Json mons = Json::array();
  for (const auto& m : r.monitors) mons.push_back(monitor_json(m));
  j["monitors"] = mons;
  j["all_monitors_pass"] = r.all_monitors_pass();
  if (r.recipe) {
    const RecipeCheck& rc = *r.recipe;
    j["recipe_check"] = Json{{"h", r.recipe_h},
                             {"iota1", rc.iota1},
                             {"theta_term", rc.theta_term},
                             {"xi1_term", rc.xi1_term},
                             {"h_budget", rc.h_budget},
                             {"theta_ok", rc.theta_ok},
                             {"xi1_ok", rc.xi1_ok}};
  }
  const EndpointMetrics& em = r.metrics;
  j["endpoint"] = Json{{"t_final", em.t_final},
                       {"generator_max_err", em.generator_max_err},
                       {"tracking_max_err", em.tracking_max_err},
                       {"theta_hat_max", em.theta_hat_max},
                       {"x2_max", em.x2_max},
                       {"x3_max", em.x3_max},
                       {"conservation_drift", em.conservation_drift}};
  const IntegrationStats& st = r.integration.stats;
  j["solver"] = Json{
      {"method", sc.solver.method == SolverMethod::kRk4 ? "rk4" : "rk45"},
      {"abs_tol", sc.solver.abs_tol},
      {"rel_tol", sc.solver.rel_tol},
      {"accepted", st.accepted},
      {"rejected", st.rejected},
      {"rhs_evals", st.rhs_evals},
      {"samples", r.integration.traj.size()}};
  j["outputs"] = r.outputs;
  j["duration_s"] = r.duration_s;
  return j.dump(2) + "\n";
}

std::string optimum_json(const OptimumCertificate& cert) {
  return optimum_obj(cert).dump(2) + "\n";
}

std::string monitors_json(const std::vector<MonitorReport>& reports) {
  Json mons = Json::array();
  bool all = true;
  for (const auto& m : reports) {
    mons.push_back(monitor_json(m));
    all = all && m.pass;
  }
  return Json{{"monitors", mons}, {"all_monitors_pass", all}}.dump(2) + "\n";
}

void write_run_outputs(RunResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoFailure, "cannot create " + out_dir);
  const fs::path dir(out_dir);
  export_csv(result.integration.traj, result.scenario.sys.clock,
             (dir / "trajectory.csv").string());
  write_plots(result, dir);
  result.outputs = {"manifest.json", "trajectory.csv", "er_envelope.svg",
                    "tracking.svg"};
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write manifest");
  out << manifest_json(result);
  if (!out) throw Error(ErrorCode::kIoFailure, "manifest write failed");
}

VerifyResult verify_csv(const std::string& csv_path, const Scenario& sc) {
  const Trajectory traj = import_csv(csv_path, state_column_names(sc.sys),
                                     derived_column_names(sc.sys));
  const OptimumCertificate opt =
      optimum_oracle(sc.sys.costs, sc.optimum_tol, sc.z_init);
  return VerifyResult{evaluate_monitors(sc, traj, opt.z)};
}

}  // namespace dptco
