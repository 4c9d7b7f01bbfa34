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

// Robust prescribed-time tracking for chain-integrator agents
//   x_q' = x_{q+1} (q < m),  x_m' = u + phi(x, d),
// with stage dimension n and the sliding-like variable s~ scaled by
// alpha_s(mu).

#include <cstddef>
#include <optional>
#include <span>
#include <string>

#include "dptco/linalg.hpp"
#include "dptco/monitor_report.hpp"
#include "dptco/timegain.hpp"

namespace dptco {

/// Binomial pole placement: k_{j+1} = C(m-1, j), so Lambda has
/// characteristic polynomial (s + 1)^{m-1}.
Vector hurwitz_gain(int m);

/// (m-1)x(m-1) companion matrix [0 I; -k1 ... -k_{m-1}].
Matrix companion_matrix(std::span<const double> K);

/// P with P A + A^T P = -Q via the Kronecker-vectorized linear system.
/// Throws kNotHurwitz if A has an eigenvalue with real part >= 0 and
/// kSingularSystem if the vectorized system is singular.
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

struct VConstants {
  double v1;
  double v2;
};

/// v1 = lambda_min(Q)/lambda_max(P), v2 = 2m lambda_max(P)/lambda_min(P).
VConstants v_constants(const Matrix& P, const Matrix& Q, int m);

/// Known bound function psi(x) of the matched uncertainty.
enum class PsiKind { kZero, kUnit, kElBound };
const char* psi_kind_name(PsiKind k) noexcept;
PsiKind parse_psi_kind(const std::string& name);
/// kElBound: scale * (1 + |x_2|^2).
double eval_psi(PsiKind k, double scale, std::span<const double> x,
                std::size_t n);

struct ChainControllerConfig {
  int m = 2;
  std::size_t n = 1;
  Vector K;
  Matrix Lambda;
  Matrix P;
  Matrix Q;
  double v1 = 0.0;
  double v2 = 0.0;
  double v = 1.0;
  GainFunction alpha_x = GainFunction::linear(1.0);
  GainFunction alpha_s = GainFunction::linear(1.0);
  /// True when alpha_s was user-supplied instead of the DC2 formula.
  bool alpha_s_override = false;
  PsiKind psi = PsiKind::kZero;
  double psi_scale = 1.0;
  /// Controller refuses to evaluate beyond this mu.
  double mu_guard = 1e300;
};

/// Assembles K (binomial when empty), Lambda, P (from Q, default identity
/// of size (m-1)), v1, v2 and alpha_s (DC2 formula unless overridden).
/// Throws kNotHurwitz for a user K that does not stabilise Lambda.
ChainControllerConfig make_chain_config(int m, std::size_t n, Vector K,
                                        std::optional<Matrix> Q, double v,
                                        GainFunction alpha_x,
                                        std::optional<GainFunction> alpha_s,
                                        double mu0, double mu_guard);

/// e_s, r1, s~ and e~_s = alpha_s(mu) s~ for one agent.
struct ChainErrorView {
  Vector e_s;
  Vector r1;
  Vector s_tilde;
  Vector e_tilde_s;
};

ChainErrorView chain_error_view(std::span<const double> x,
                                std::span<const double> ref, double mu,
                                const ChainControllerConfig& cfg);

/// Stacked form k1^-1 alpha_s (K~^T Phi(mu) (x) I_n) e_s.
Vector chain_transform_stacked(std::span<const double> e_s, double mu,
                               const ChainControllerConfig& cfg);

/// Control law; throws kGuardExceeded for mu > cfg.mu_guard.
Vector chain_control(std::span<const double> x, std::span<const double> ref,
                     double mu, const ChainControllerConfig& cfg);

/// Smallest C with |e_s(t)| <= C kappa(-(v1/4m) alpha_x(mu(t))), plus
/// sup |e~_s|. Pass iff both are finite. Throws kEmptyTrajectory.
MonitorReport chain_decay_monitor(std::span<const double> times,
                                  std::span<const double> es_norms,
                                  std::span<const double> etilde_norms,
                                  const ChainControllerConfig& cfg,
                                  const PrescribedClock& clock);

}  // namespace dptco
