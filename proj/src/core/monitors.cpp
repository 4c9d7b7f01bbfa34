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
#include "dptco/monitors.hpp"

#include <algorithm>
#include <cmath>

#include "dptco/errors.hpp"

namespace dptco {

namespace {

void require_samples(const Trajectory& traj) {
  if (traj.size() == 0)
    throw Error(ErrorCode::kEmptyTrajectory, "trajectory has no samples");
}

std::vector<double> column(const Trajectory& traj, std::size_t idx,
                           bool derived) {
  std::vector<double> out(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k)
    out[k] = derived ? traj.derived[k][idx] : traj.states[k][idx];
  return out;
}

/// Folds per-agent reports into one: worst ratio, earliest violation.
MonitorReport merge(const std::string& name,
                    const std::vector<MonitorReport>& parts) {
  MonitorReport rep;
  rep.name = name;
  for (const auto& p : parts) {
    rep.pass = rep.pass && p.pass;
    rep.max_ratio = std::max(rep.max_ratio, p.max_ratio);
    if (p.first_violation_t >= 0.0 &&
        (rep.first_violation_t < 0.0 ||
         p.first_violation_t < rep.first_violation_t))
      rep.first_violation_t = p.first_violation_t;
  }
  if (!parts.empty()) {
    for (const auto& [key, value] : parts.front().extras) {
      double worst = value;
      for (const auto& p : parts) worst = std::max(worst, p.extra(key, value));
      rep.extras.push_back({key, worst});
    }
  }
  return rep;
}

}  // namespace

MonitorReport conservation_monitor(const Trajectory& traj, std::size_t n_agents,
                                   std::size_t m, double tol) {
  require_samples(traj);
  MonitorReport rep;
  rep.name = "conservation";
  const std::size_t g = n_agents * m;
  Vector s0(m, 0.0);
  for (std::size_t i = 0; i < n_agents; ++i)
    for (std::size_t k = 0; k < m; ++k) s0[k] += traj.states[0][g + i * m + k];
  double worst = 0.0;
  for (std::size_t r = 0; r < traj.size(); ++r) {
    Vector s(m, 0.0);
    for (std::size_t i = 0; i < n_agents; ++i)
      for (std::size_t k = 0; k < m; ++k) s[k] += traj.states[r][g + i * m + k];
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k) d += (s[k] - s0[k]) * (s[k] - s0[k]);
    d = std::sqrt(d);
    worst = std::max(worst, d);
    if (!(d <= tol) && rep.first_violation_t < 0.0)
      rep.first_violation_t = traj.times[r];
  }
  rep.pass = rep.first_violation_t < 0.0;
  rep.max_ratio = worst / tol;
  rep.extras.push_back({"max_drift", worst});
  rep.extras.push_back({"tol", tol});
  return rep;
}

MonitorReport finite_controls_monitor(const Trajectory& traj,
                                      const CoupledSystem& sys) {
  require_samples(traj);
  MonitorReport rep;
  rep.name = "finite_controls";
  const std::size_t per = sys.derived_per_agent();
  double umax = 0.0;
  for (std::size_t r = 0; r < traj.size(); ++r) {
    for (std::size_t i = 0; i < sys.n_agents() && per; ++i)
      for (std::size_t k = 0; k < sys.n; ++k) {
        const double u = traj.derived[r][i * per + k];
        if (!std::isfinite(u)) {
          if (rep.first_violation_t < 0.0) rep.first_violation_t = traj.times[r];
        } else {
          umax = std::max(umax, std::fabs(u));
        }
      }
  }
  rep.pass = rep.first_violation_t < 0.0;
  rep.extras.push_back({"max_abs_u", umax});
  return rep;
}

Vector er_norms(const Trajectory& traj, const CoupledSystem& sys,
                std::span<const double> z_star) {
  const std::size_t g = sys.gen_dim();
  Vector out(traj.size());
  for (std::size_t r = 0; r < traj.size(); ++r) {
    std::span<const double> y(traj.states[r]);
    out[r] = make_error_state(y.subspan(0, g), y.subspan(g, g), sys.costs, z_star)
                 .norm();
  }
  return out;
}

Vector er_envelope(const Trajectory& traj, const Scenario& sc,
                   double er0_norm) {
  const GeneratorConstants& c = sc.gen_constants;
  const double gamma = std::sqrt(c.c3 / c.c2);
  Vector out(traj.size());
  for (std::size_t r = 0; r < traj.size(); ++r) {
    const double w = gain_time_integral(sc.sys.clock, sc.sys.alpha, traj.times[r]);
    out[r] = gamma * er0_norm * std::exp(-c.c_star * w);
  }
  return out;
}

double lyapunov_noise_floor(const Scenario& sc) {
  const std::size_t dim = sc.sys.gen_dim();
  const double eps = 1e3 * sc.solver.abs_tol +
                     sc.optimum_tol / std::max(sc.cost_constants.rho, 1e-12);
  const double weight = 0.5 * sc.gen_constants.c1 * (1.0 + 1.0 / sc.lambda2) + 1.0;
  return weight * static_cast<double>(dim) * eps * eps;
}

std::vector<MonitorReport> evaluate_monitors(const Scenario& sc,
                                             const Trajectory& traj,
                                             std::span<const double> z_star) {
  require_samples(traj);
  const CoupledSystem& sys = sc.sys;
  const std::size_t N = sys.n_agents(), m = sys.costs.dim();
  const std::size_t per = sys.derived_per_agent();
  std::vector<MonitorReport> out;
  Vector er;
  for (const MonitorRequest& req : sc.monitors) {
    const std::string& name = req.name;
    if (name == "conservation") {
      out.push_back(conservation_monitor(traj, N, m, req.tol > 0 ? req.tol : 1e-8));
    } else if (name == "generator_envelope" || name == "lyapunov_decrease") {
      if (er.empty()) er = er_norms(traj, sys, z_star);
      if (name == "generator_envelope") {
        out.push_back(envelope_monitor(traj.times, er, sys.clock, sys.alpha,
                                       sc.gen_constants,
                                       req.slack >= 0 ? req.slack : 0.05));
      } else {
        const LyapunovVr vr(sys.net, m, sc.gen_constants);
        const std::size_t g = sys.gen_dim();
        Vector v(traj.size());
        for (std::size_t r = 0; r < traj.size(); ++r) {
          std::span<const double> y(traj.states[r]);
          v[r] = vr(make_error_state(y.subspan(0, g), y.subspan(g, g), sys.costs,
                                     z_star));
        }
        MonitorReport rep = lyapunov_decrease_check(
            traj.times, v, sys.clock, sys.alpha, sc.gen_constants.c_star,
            req.tol > 0 ? req.tol : 1e-3, lyapunov_noise_floor(sc));
        rep.name = "lyapunov_decrease";
        rep.extras.push_back({"abs_floor", lyapunov_noise_floor(sc)});
        out.push_back(rep);
      }
    } else if (name == "chain_decay") {
      std::vector<MonitorReport> parts;
      for (std::size_t i = 0; i < N; ++i)
        parts.push_back(chain_decay_monitor(
            traj.times, column(traj, i * per + sys.n, true),
            column(traj, i * per + sys.n + 1, true), *sys.chain, sys.clock));
      out.push_back(merge(name, parts));
    } else if (name == "invariant_set") {
      std::vector<MonitorReport> parts;
      for (std::size_t i = 0; i < N; ++i) {
        const Vector et = column(traj, i * per + sys.n + 1, true);
        const double h = req.h > 0 ? req.h : default_invariant_radius(et[0]);
        parts.push_back(invariant_set_monitor(traj.times, et, h,
                                              req.slack >= 0 ? req.slack : 0.02));
      }
      out.push_back(merge(name, parts));
    } else if (name == "strict_envelope") {
      std::vector<MonitorReport> parts;
      for (std::size_t i = 0; i < N; ++i)
        parts.push_back(strict_envelope_fit(
            traj.times, column(traj, i * per + sys.n, true), *sys.strict,
            sys.clock));
      out.push_back(merge(name, parts));
    } else if (name == "theta_hat_bound") {
      double tau_max = 0.0;
      for (std::size_t i = 0; i < N; ++i)
        for (double t : column(traj, i * per + sys.n + 2, true))
          tau_max = std::max(tau_max, std::fabs(t));
      std::vector<MonitorReport> parts;
      for (std::size_t i = 0; i < N; ++i)
        parts.push_back(theta_hat_bound_check(
            traj.times, column(traj, sys.ctrl_offset(i), false), tau_max,
            *sys.strict, sys.clock));
      out.push_back(merge(name, parts));
    } else if (name == "finite_controls") {
      out.push_back(finite_controls_monitor(traj, sys));
    }
  }
  return out;
}

EndpointMetrics endpoint_metrics(const Scenario& sc, const Trajectory& traj,
                                 std::span<const double> z_star) {
  require_samples(traj);
  const CoupledSystem& sys = sc.sys;
  const std::size_t N = sys.n_agents(), m = sys.costs.dim();
  const Vector& y = traj.states.back();
  EndpointMetrics em;
  em.t_final = traj.times.back();
  for (std::size_t i = 0; i < N; ++i) {
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k)
      d += (y[i * m + k] - z_star[k]) * (y[i * m + k] - z_star[k]);
    em.generator_max_err = std::max(em.generator_max_err, std::sqrt(d));
  }
  em.conservation_drift = conservation_monitor(traj, N, m).extra("max_drift");
  if (sys.plant == PlantKind::kNone) return em;
  em.tracking_max_err = 0.0;
  const std::size_t n = sys.n;
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t xo = sys.x_offset(i);
    const Vector& off = sys.agents[i].offset;
    double d = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double target = z_star[k] + (off.empty() ? 0.0 : off[k]);
      d += (y[xo + k] - target) * (y[xo + k] - target);
    }
    em.tracking_max_err = std::max(em.tracking_max_err, std::sqrt(d));
    auto stage_norm = [&](int q) {
      return norm2(std::span<const double>(y).subspan(xo + (q - 1) * n, n));
    };
    em.x2_max = std::max(em.x2_max, stage_norm(2));
    if (sys.order >= 3) em.x3_max = std::max(em.x3_max, stage_norm(3));
    if (sys.ctrl_dim() > 0)
      em.theta_hat_max =
          std::max(em.theta_hat_max, std::fabs(y[sys.ctrl_offset(i)]));
  }
  return em;
}

}  // namespace dptco
