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

// Adaptive prescribed-time tracking for strict-feedback agents
//   x_1' = x_2,  x_q' = x_{q+1} + theta phi_q(x_q),  x_m' = u + theta phi_m,
// through backstepping with first-order prescribed-time filters and a
// leaky adaptation law for the scalar theta.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dptco/linalg.hpp"
#include "dptco/monitor_report.hpp"
#include "dptco/timegain.hpp"

namespace dptco {

/// Stage nonlinearities, applied elementwise; each is psi(x) x with
/// |psi| <= 1.
enum class PhiKind { kLinear, kSin, kTanh };
const char* phi_kind_name(PhiKind k) noexcept;
PhiKind parse_phi_kind(const std::string& name);
void eval_phi(PhiKind k, std::span<const double> x, std::span<double> out);
/// Diagonal of psi(x) with phi(x) = diag(psi) x.
void eval_psi_diag(PhiKind k, std::span<const double> x,
                   std::span<double> out);

struct StrictFeedbackConfig {
  int m = 2;
  std::size_t n = 1;
  double l = 1.0;
  /// L_q = m + l + 1 - q, index q-1.
  Vector L;
  /// c_q, index q-1.
  Vector c;
  /// upsilon_q for q = 2..m, index q-2.
  Vector upsilon;
  double sigma = 2.0;
  double sigma_prime = 1.0;
  /// Recipe inputs; empty when the gains were given raw.
  Vector rho;
  Vector c_bar;
  Vector upsilon_bar;
  bool raw_gains = false;
  /// phi_q for q = 2..m, index q-2.
  std::vector<PhiKind> phi;
  GainFunction alpha_xi = GainFunction::linear(1.0);
  double mu_guard = 1e300;

  std::size_t ctrl_dim() const noexcept { return 1 + n * (m - 1); }
};

/// sigma = (3 + sigma')/2, c_1 = cbar_1 + L_1 + 3/2, c_q = cbar_q + L_q + 2,
/// upsilon_q = ubar_q + L_q + rho_q + 1/2. Throws kMarginTooSmall if
/// sigma' <= 0, any rho_q <= 0, or any margin < sigma/2.
StrictFeedbackConfig select_parameters(int m, std::size_t n, double l,
                                       double sigma_prime, const Vector& rho,
                                       const Vector& c_bar,
                                       const Vector& upsilon_bar);

/// Raw gains supplied directly, bypassing the recipe; sigma' = 2 sigma - 3.
StrictFeedbackConfig raw_parameters(int m, std::size_t n, double l,
                                    const Vector& c, const Vector& upsilon,
                                    double sigma);

/// Stage bookkeeping; vectors hold m (or m-1) stacked n-blocks.
struct VirtualControls {
  Vector xi;        // xi_1..xi_m
  Vector x_tilde;   // x~_1..x~_m
  Vector xi_tilde;  // xi~_2..xi~_m
};

/// Throws kGuardExceeded past cfg.mu_guard.
VirtualControls virtual_controls(std::span<const double> x,
                                 std::span<const double> ref,
                                 double theta_hat,
                                 std::span<const double> xi_f, double mu,
                                 const StrictFeedbackConfig& cfg);

/// xi_qf' = upsilon_q alpha_xi (xi_{q-1} - xi_qf).
Vector filter_rhs(std::span<const double> xi_f, std::span<const double> xi,
                  double mu, const StrictFeedbackConfig& cfg);

/// tau = sum_{q>=2} alpha_xi^{2 L_q} x~_q^T phi_q(x_q).
double adaptation_tau(std::span<const double> x,
                      std::span<const double> x_tilde, double mu,
                      const StrictFeedbackConfig& cfg);

/// theta_hat' = tau - sigma alpha_xi theta_hat.
double adaptation_rhs(double theta_hat, double tau, double mu,
                      const StrictFeedbackConfig& cfg);

/// u = xi_m.
Vector sf_control(std::span<const double> x, std::span<const double> ref,
                  double theta_hat, std::span<const double> xi_f, double mu,
                  const StrictFeedbackConfig& cfg);

struct ScaledErrors {
  Vector omega;  // alpha_xi^{L_q} x~_q, q = 1..m
  Vector eta;    // alpha_xi^{L_q} xi~_q, q = 2..m
  double theta_tilde = 0.0;
  double norm() const;
};

/// Per-stage computation.
ScaledErrors scaled_errors(std::span<const double> x,
                           std::span<const double> ref, double theta_hat,
                           std::span<const double> xi_f, double theta,
                           double mu, const StrictFeedbackConfig& cfg);

/// Stacked computation from e_s = [x1 - ref; x2..xm; theta_hat; xi_f] via
/// the block matrices Phi_1, Phi_2, Lambda_1..Lambda_4.
ScaledErrors scaled_errors_stacked(std::span<const double> e_s,
                                   std::span<const double> ref, double theta,
                                   double mu, const StrictFeedbackConfig& cfg);

/// Pass iff |e~_s(t0)| <= h implies |e~_s(t)| <= h (1 + slack) for all t.
MonitorReport invariant_set_monitor(std::span<const double> times,
                                    std::span<const double> etilde_norms,
                                    double h, double slack = 0.02);

/// 2 |e~_s(t0)| + 1.
double default_invariant_radius(double etilde0_norm);

/// Computable parts of the invariant-set parameter conditions:
/// iota_1, sigma theta^2/(2 iota_1) vs h^2/8, and Xi_1/(rho_2 iota_1).
struct RecipeCheck {
  double iota1 = 0.0;
  double theta_term = 0.0;
  double xi1_term = 0.0;
  double h_budget = 0.0;  // h^2/8
  bool theta_ok = false;
  bool xi1_ok = false;
};
RecipeCheck check_recipe(const StrictFeedbackConfig& cfg, double theta,
                         double h);

/// Smallest C with |e_s(t)| <= C / alpha_xi(mu(t)); pass iff finite.
MonitorReport strict_envelope_fit(std::span<const double> times,
                                  std::span<const double> es_norms,
                                  const StrictFeedbackConfig& cfg,
                                  const PrescribedClock& clock);

/// |theta_hat(t)| <= (alpha_xi(mu0)|theta_hat0| + (2 sigma')^{-1/2} tau_max)
/// / alpha_xi(mu(t)).
MonitorReport theta_hat_bound_check(std::span<const double> times,
                                    std::span<const double> theta_hat,
                                    double tau_max,
                                    const StrictFeedbackConfig& cfg,
                                    const PrescribedClock& clock);

}  // namespace dptco
