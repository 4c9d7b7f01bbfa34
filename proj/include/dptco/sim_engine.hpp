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

// Deterministic integration of the generator + agents + controller states
// up to the guard time, trajectory logging and CSV round-trip.
//
// State layout: [varpi (N*m); p (N*m); x^1..x^N (order*n each);
//                ctrl^1..ctrl^N (ctrl_dim each)], with m == n when agents
// are present.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dptco/chain_ctrl.hpp"
#include "dptco/costs.hpp"
#include "dptco/graph.hpp"
#include "dptco/linalg.hpp"
#include "dptco/strictfb_ctrl.hpp"
#include "dptco/timegain.hpp"

namespace dptco {

enum class SolverMethod { kRk4, kRk45 };

struct SolverSettings {
  SolverMethod method = SolverMethod::kRk45;
  double dt = 1e-3;  // RK4 step
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double dt_max = 1e-2;
  /// Step ceiling coefficient: dt <= min(dt_max, ceiling_coef / mu^2).
  double ceiling_coef = 0.05;
  long max_steps = 10'000'000;
  long log_stride = 1;

  /// Throws kConfigError on out-of-range values.
  void validate() const;
};

using OdeRhs =
    std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

/// Called at t0, every log_stride accepted steps, and at the final time.
using OdeObserver = std::function<void(double t, std::span<const double> y)>;

struct IntegrationStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  double t_final = 0.0;
};

/// Integrates y' = f(t, y) over [clock.t0(), clock.guard_time()]. The RHS is
/// never evaluated at or past t0 + T. Throws NonFiniteStateError and
/// kStepUnderflow (step < 1e-15 T).
IntegrationStats integrate_ode(const OdeRhs& f, const PrescribedClock& clock,
                               std::span<const double> y0,
                               const SolverSettings& settings,
                               const OdeObserver& observer);

enum class DisturbanceKind { kNone, kConstant, kSinusoid, kNoise };

/// Deterministic seeded signal d(t) in R^n per agent. Noise is a sum of
/// eight seeded sinusoids normalised so |d_k(t)| <= bound.
struct Disturbance {
  DisturbanceKind kind = DisturbanceKind::kNone;
  double amplitude = 0.0;
  double frequency = 1.0;
  std::uint64_t seed = 1;

  void eval(double t, std::size_t agent, std::size_t n,
            std::span<double> out) const;
  double bound() const noexcept;
};

const char* disturbance_kind_name(DisturbanceKind k) noexcept;
DisturbanceKind parse_disturbance_kind(const std::string& name);

enum class PlantKind { kNone, kChain, kEulerLagrange, kStrictFeedback };
const char* plant_kind_name(PlantKind k) noexcept;
PlantKind parse_plant_kind(const std::string& name);

/// Two-link manipulator parameters theta_1..theta_6 and gravity g.
struct ElParams {
  std::array<double, 6> theta{7.0, 0.96, 1.2, 5.96, 2.0, 1.2};
  double g = 9.8;
};

Matrix el_inertia(const ElParams& p, std::span<const double> x1);
/// Fixed form: row 1 scales with x_21, the (2,2) entry with x_22.
Matrix el_coriolis(const ElParams& p, std::span<const double> x1,
                   std::span<const double> x2);
Vector el_gravity(const ElParams& p, std::span<const double> x1);

struct AgentSpec {
  Vector x0;      // order * n
  Vector ctrl0;   // ctrl_dim; for strict feedback [theta_hat0, xi_f0]
  Vector offset;  // formation offset, empty means zero
  double theta_true = 0.0;  // strict feedback
};

struct CoupledSystem {
  Network net = ring_network(1);
  CostSet costs = CostSet({CostFunction::quadratic(Matrix::identity(1), {0.0})});
  PrescribedClock clock{0.0, 1.0};
  GainFunction alpha = GainFunction::linear(1.0);
  Vector varpi0;
  Vector p0;

  PlantKind plant = PlantKind::kNone;
  int order = 0;
  std::size_t n = 0;
  std::vector<AgentSpec> agents;
  std::optional<ChainControllerConfig> chain;
  std::optional<StrictFeedbackConfig> strict;
  ElParams el_true;
  ElParams el_nominal;
  Disturbance disturbance;

  std::size_t n_agents() const noexcept { return net.size(); }
  std::size_t gen_dim() const noexcept { return n_agents() * costs.dim(); }
  std::size_t plant_dim() const noexcept;
  std::size_t ctrl_dim() const noexcept;
  std::size_t state_dim() const noexcept;
  std::size_t x_offset(std::size_t i) const noexcept;
  std::size_t ctrl_offset(std::size_t i) const noexcept;
  /// Derived channels per agent: u (n), es_norm, etilde_norm, tau (strict).
  std::size_t derived_per_agent() const noexcept;

  /// Checks every dimension; throws kDimensionMismatch.
  void validate() const;
  Vector initial_state() const;
  Vector reference(std::span<const double> y, std::size_t i) const;
  /// Controller output of agent i at (t, y).
  Vector control(double t, std::span<const double> y, std::size_t i) const;
  void rhs(double t, std::span<const double> y, std::span<double> dy) const;
  /// Derived channels at (t, y), agent-major.
  Vector derived(double t, std::span<const double> y) const;
};

/// varpi^i + omega^i, the tracked reference; throws kDimensionMismatch.
Vector formation_offset_wrap(std::span<const double> varpi_i,
                             std::span<const double> omega_i);

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<Vector> derived;
  std::vector<std::string> state_columns;
  std::vector<std::string> derived_columns;

  std::size_t size() const noexcept { return times.size(); }
};

std::vector<std::string> state_column_names(const CoupledSystem& sys);
std::vector<std::string> derived_column_names(const CoupledSystem& sys);

struct IntegrationResult {
  Trajectory traj;
  IntegrationStats stats;
};

IntegrationResult integrate(const CoupledSystem& sys,
                            const SolverSettings& settings);

/// Header "t,mu,<state columns>,<derived columns>", %.17g values, LF.
/// Throws kIoFailure / kEmptyTrajectory.
void export_csv(const Trajectory& traj, const PrescribedClock& clock,
                const std::string& path);

/// Reads a CSV written by export_csv; the header must match the expected
/// column names exactly. Throws kSchemaMismatch / kIoFailure.
Trajectory import_csv(const std::string& path,
                      const std::vector<std::string>& state_columns,
                      const std::vector<std::string>& derived_columns);

}  // namespace dptco
