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

// Distributed optimal-trajectory generator: per-agent consensus plus
// gradient-tracking dynamics scaled by alpha(mu), its constants, and the
// verification-only error coordinates and monitors.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dptco/costs.hpp"
#include "dptco/graph.hpp"
#include "dptco/linalg.hpp"
#include "dptco/monitor_report.hpp"
#include "dptco/timegain.hpp"

namespace dptco {

struct GeneratorConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c_star = 0.0;
};

/// Throws kNonPositiveInput unless every input is > 0.
GeneratorConstants generator_constants(double rho, double varrho,
                                       double lambda2, double lambda_n);

/// Stacked agent blocks, agent i occupying [i*m, (i+1)*m).
struct GeneratorState {
  std::size_t n = 0;
  std::size_t m = 0;
  Vector varpi;
  Vector p;
};

struct NeighborValue {
  double weight;
  std::span<const double> varpi;
};

/// One agent's update. It sees only its own states, its cost and the
/// neighbours' varpi values.
void generator_agent_rhs(std::span<const double> varpi_i,
                         std::span<const double> p_i,
                         const std::vector<NeighborValue>& neighbors,
                         const CostFunction& cost, double alpha,
                         std::span<double> dvarpi_i, std::span<double> dp_i);

/// All agents, in fixed agent order, with a precomputed alpha(mu(t)).
void generator_rhs(const Network& net, const CostSet& costs, double alpha,
                   std::span<const double> varpi, std::span<const double> p,
                   std::span<double> dvarpi, std::span<double> dp);

/// Convenience form evaluating alpha(mu(t)); throws kTimeOutOfWindow.
GeneratorState generator_rhs(const GeneratorState& s, double t,
                             const Network& net, const CostSet& costs,
                             const GainFunction& alpha,
                             const PrescribedClock& clock);

enum class InitPMode { kZeros, kRandomZeroSum };

/// Initial gradient-tracking state with sum_i p^i = 0.
Vector init_p(std::size_t n, std::size_t m, InitPMode mode,
              std::uint64_t seed = 0);

/// e_varpi = varpi - 1 (x) z*, e_p = p + grad F(1 (x) z*).
struct ErrorState {
  Vector e_varpi;
  Vector e_p;
  double norm() const;
};

ErrorState make_error_state(std::span<const double> varpi,
                            std::span<const double> p, const CostSet& costs,
                            std::span<const double> z_star);

/// Lyapunov function of the error dynamics in the reduced coordinates.
/// Throws DisconnectedError for a disconnected network.
class LyapunovVr {
 public:
  LyapunovVr(const Network& net, std::size_t m, GeneratorConstants consts);
  double operator()(const ErrorState& e) const;

 private:
  std::size_t n_;
  std::size_t m_;
  GeneratorConstants consts_;
  ReducedBasis basis_;
  Matrix lr_inverse_;
};

double lyapunov_vr(const ErrorState& e, const Network& net,
                   const GeneratorConstants& consts);

/// ratio(t) = |e_r(t)| / (sqrt(c3/c2) |e_r(t0)| kappa(-c* alpha)), evaluated
/// in log space so the envelope may underflow. Throws kEmptyTrajectory.
MonitorReport envelope_monitor(std::span<const double> times,
                               std::span<const double> er_norms,
                               const PrescribedClock& clock,
                               const GainFunction& alpha,
                               const GeneratorConstants& consts,
                               double slack = 0.05);

/// Integrated form of dV/dt <= -2 c* alpha V between logged samples:
/// V_{k+1} <= V_k exp(-2 c* int alpha) (1 + tol) + abs_floor. The floor
/// covers the error of the numerically computed optimum.
MonitorReport lyapunov_decrease_check(std::span<const double> times,
                                      std::span<const double> v,
                                      const PrescribedClock& clock,
                                      const GainFunction& alpha,
                                      double c_star, double tol = 1e-3,
                                      double abs_floor = 0.0);

}  // namespace dptco
