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
#pragma once

// Post-hoc monitors over a logged trajectory. Every monitor reads only the
// logged states and derived channels plus the oracle optimum, so recomputing
// them from an exported CSV reproduces the in-run values.

#include <span>
#include <vector>

#include "dptco/monitor_report.hpp"
#include "dptco/scenario.hpp"
#include "dptco/sim_engine.hpp"

namespace dptco {

/// max_t |sum_i p^i(t) - sum_i p^i(t0)|; pass iff <= tol.
MonitorReport conservation_monitor(const Trajectory& traj, std::size_t n_agents,
                                   std::size_t m, double tol = 1e-8);

/// Pass iff every logged control channel is finite.
MonitorReport finite_controls_monitor(const Trajectory& traj,
                                      const CoupledSystem& sys);

/// |e_r(t)| at every logged sample.
Vector er_norms(const Trajectory& traj, const CoupledSystem& sys,
                std::span<const double> z_star);

/// Envelope sqrt(c3/c2) |e_r(t0)| kappa(-c* alpha(mu(t))) at each sample.
Vector er_envelope(const Trajectory& traj, const Scenario& sc,
                   double er0_norm);

/// Floor absorbed by the Lyapunov decrease check: the integrator's absolute
/// tolerance and the optimum's residual, propagated through V.
double lyapunov_noise_floor(const Scenario& sc);

/// Evaluates the scenario's monitor list in order, one report per entry.
std::vector<MonitorReport> evaluate_monitors(const Scenario& sc,
                                             const Trajectory& traj,
                                             std::span<const double> z_star);

/// Final-sample summaries used by the acceptance checks and the manifest.
struct EndpointMetrics {
  double generator_max_err = 0.0;  // max_i |varpi^i - z*|
  double tracking_max_err = -1.0;  // max_i |y^i - z* - omega^i|; -1 without agents
  double theta_hat_max = -1.0;     // max_i |theta_hat^i|
  double x2_max = -1.0;            // max_i |x_2^i|
  double x3_max = -1.0;            // max_i |x_3^i|
  double conservation_drift = 0.0;
  double t_final = 0.0;
};

EndpointMetrics endpoint_metrics(const Scenario& sc, const Trajectory& traj,
                                 std::span<const double> z_star);

}  // namespace dptco
