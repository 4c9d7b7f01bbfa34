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
#include "dptco/chain_ctrl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dptco/errors.hpp"

namespace dptco {

Vector hurwitz_gain(int m) {
  if (m < 2) throw Error(ErrorCode::kInvalidArgument, "chain order m >= 2");
  const int d = m - 1;
  Vector K(d);
  double c = 1.0;  // C(d, j)
  for (int j = 0; j < d; ++j) {
    K[j] = c;
    c = c * (d - j) / (j + 1);
  }
  return K;
}

Matrix companion_matrix(std::span<const double> K) {
  const std::size_t d = K.size();
  if (d == 0) throw Error(ErrorCode::kInvalidArgument, "K must be nonempty");
  Matrix A(d, d);
  for (std::size_t i = 0; i + 1 < d; ++i) A(i, i + 1) = 1.0;
  for (std::size_t j = 0; j < d; ++j) A(d - 1, j) = -K[j];
  return A;
}

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
  const std::size_t d = A.rows();
  if (!A.square() || Q.rows() != d || Q.cols() != d)
    throw Error(ErrorCode::kDimensionMismatch, "Lyapunov operands");
  for (const auto& ev : eigenvalues(A))
    if (!(ev.real() < 0.0)) {
      std::ostringstream os;
      os << "matrix is not Hurwitz (eigenvalue " << ev.real() << "+"
         << ev.imag() << "i)";
      throw Error(ErrorCode::kNotHurwitz, os.str());
    }
  // vec(P A + A^T P) = (A^T (x) I + I (x) A^T) vec(P), row-major vec.
  const Matrix I = Matrix::identity(d);
  const Matrix At = A.transpose();
  const Matrix M = kron(I, At) + kron(At, I);
  Vector rhs(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) rhs[i * d + j] = -Q(i, j);
  const Vector p = solve(M, rhs);
  Matrix P(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      P(i, j) = 0.5 * (p[i * d + j] + p[j * d + i]);
  return P;
}

VConstants v_constants(const Matrix& P, const Matrix& Q, int m) {
  const Vector ep = jacobi_eigen(P).values;
  const Vector eq = jacobi_eigen(Q).values;
  if (!(ep.front() > 0.0) || !(eq.front() > 0.0))
    throw Error(ErrorCode::kNonPositiveInput, "P and Q must be positive");
  return {eq.front() / ep.back(), 2.0 * m * ep.back() / ep.front()};
}

const char* psi_kind_name(PsiKind k) noexcept {
  switch (k) {
    case PsiKind::kZero: return "zero";
    case PsiKind::kUnit: return "unit";
    case PsiKind::kElBound: return "el_bound";
  }
  return "unknown";
}

PsiKind parse_psi_kind(const std::string& name) {
  if (name == "zero") return PsiKind::kZero;
  if (name == "unit") return PsiKind::kUnit;
  if (name == "el_bound") return PsiKind::kElBound;
  throw Error(ErrorCode::kConfigError, "unknown psi id '" + name + "'");
}

double eval_psi(PsiKind k, double scale, std::span<const double> x,
                std::size_t n) {
  switch (k) {
    case PsiKind::kZero: return 0.0;
    case PsiKind::kUnit: return scale;
    case PsiKind::kElBound: {
      const auto x2 = x.subspan(n, n);
      return scale * (1.0 + dot(x2, x2));
    }
  }
  return 0.0;
}

ChainControllerConfig make_chain_config(int m, std::size_t n, Vector K,
                                        std::optional<Matrix> Q, double v,
                                        GainFunction alpha_x,
                                        std::optional<GainFunction> alpha_s,
                                        double mu0, double mu_guard) {
  if (m < 2 || n == 0)
    throw Error(ErrorCode::kInvalidArgument, "chain needs m >= 2 and n >= 1");
  if (!(v > 0.0)) throw Error(ErrorCode::kNonPositiveInput, "v must be > 0");
  ChainControllerConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.K = K.empty() ? hurwitz_gain(m) : std::move(K);
  if (cfg.K.size() != static_cast<std::size_t>(m - 1))
    throw Error(ErrorCode::kDimensionMismatch, "K must have m-1 entries");
  if (cfg.K[0] == 0.0)
    throw Error(ErrorCode::kNotHurwitz, "k1 = 0 leaves Lambda singular");
  cfg.Lambda = companion_matrix(cfg.K);
  cfg.Q = Q ? *Q : Matrix::identity(m - 1);
  cfg.P = solve_lyapunov(cfg.Lambda, cfg.Q);
  const VConstants vc = v_constants(cfg.P, cfg.Q, m);
  cfg.v1 = vc.v1;
  cfg.v2 = vc.v2;
  cfg.v = v;
  cfg.alpha_x = alpha_x;
  if (alpha_s) {
    cfg.alpha_s = *alpha_s;
    cfg.alpha_s_override = true;
  } else {
    cfg.alpha_s = alpha_s_from_dc2(alpha_x, cfg.v1, m, mu0);
  }
  cfg.mu_guard = mu_guard;
  return cfg;
}

namespace {

void require_state(std::span<const double> x, std::span<const double> ref,
                   const ChainControllerConfig& cfg) {
  if (x.size() != cfg.m * cfg.n || ref.size() != cfg.n)
    throw Error(ErrorCode::kDimensionMismatch, "chain state dimensions");
}

void require_guard(double mu, double mu_guard) {
  if (mu > mu_guard) {
    std::ostringstream os;
    os.precision(17);
    os << "mu=" << mu << " exceeds the guard " << mu_guard;
    throw Error(ErrorCode::kGuardExceeded, os.str());
  }
}

}  // namespace

ChainErrorView chain_error_view(std::span<const double> x,
                                std::span<const double> ref, double mu,
                                const ChainControllerConfig& cfg) {
  require_state(x, ref, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  const double ax = cfg.alpha_x(mu);
  const double k1 = cfg.K[0];
  ChainErrorView v;
  v.e_s.assign(x.begin(), x.end());
  for (std::size_t k = 0; k < n; ++k) v.e_s[k] -= ref[k];
  v.r1.assign(n * (m - 1), 0.0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double scale = std::pow(ax, -static_cast<double>(j));
    for (std::size_t k = 0; k < n; ++k)
      v.r1[j * n + k] = scale * x[j * n + k];
  }
  const double lm_scale = std::pow(ax, -static_cast<double>(m - 1));
  v.s_tilde.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j + 1 < m; ++j) acc += cfg.K[j] * v.r1[j * n + k];
    v.s_tilde[k] =
        (acc + lm_scale * x[(m - 1) * n + k]) / k1 - ref[k];
  }
  const double as = cfg.alpha_s(mu);
  v.e_tilde_s.resize(n);
  for (std::size_t k = 0; k < n; ++k) v.e_tilde_s[k] = as * v.s_tilde[k];
  return v;
}

Vector chain_transform_stacked(std::span<const double> e_s, double mu,
                               const ChainControllerConfig& cfg) {
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  if (e_s.size() != m * n)
    throw Error(ErrorCode::kDimensionMismatch, "e_s dimension");
  // Row vector K~^T Phi(mu), K~ = [K; 1].
  const double ax = cfg.alpha_x(mu);
  Vector row(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double kj = j + 1 < m ? cfg.K[j] : 1.0;
    row[j] = kj * std::pow(ax, -static_cast<double>(j));
  }
  const double scale = cfg.alpha_s(mu) / cfg.K[0];
  Vector out(n, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t k = 0; k < n; ++k) out[k] += row[j] * e_s[j * n + k];
  for (double& o : out) o *= scale;
  return out;
}

Vector chain_control(std::span<const double> x, std::span<const double> ref,
                     double mu, const ChainControllerConfig& cfg) {
  require_guard(mu, cfg.mu_guard);
  const ChainErrorView ev = chain_error_view(x, ref, mu, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  const double ax = cfg.alpha_x(mu);
  const double dx = cfg.alpha_x.delta(mu);
  const double ds = cfg.alpha_s.delta(mu);
  const double Lm = static_cast<double>(m - 1);
  const double k1 = cfg.K[0];
  const double B = std::pow(ax, -Lm) / k1;
  const double psi = eval_psi(cfg.psi, cfg.psi_scale, x, n);
  const double gain = (cfg.v + psi * psi + 1.0) * (k1 > 0.0 ? 1.0 : -1.0);

  // r1' blocks: x_2, then alpha_x^-Lj (x_{j+1} - L_j delta_x x_j).
  Vector pi(n, 0.0);
  for (std::size_t j = 0; j + 1 < m; ++j) {
    const double Lj = static_cast<double>(j);
    const double scale = std::pow(ax, -Lj);
    for (std::size_t k = 0; k < n; ++k) {
      const double rdot =
          scale * (x[(j + 1) * n + k] - Lj * dx * x[j * n + k]);
      pi[k] += cfg.K[j] * rdot;
    }
  }
  const double axLm = std::pow(ax, Lm);
  Vector u(n);
  for (std::size_t k = 0; k < n; ++k) {
    pi[k] = axLm * pi[k] - Lm * dx * x[(m - 1) * n + k];
    u[k] = -gain * ev.e_tilde_s[k] - pi[k] - ds * ev.s_tilde[k] / B;
  }
  return u;
}

MonitorReport chain_decay_monitor(std::span<const double> times,
                                  std::span<const double> es_norms,
                                  std::span<const double> etilde_norms,
                                  const ChainControllerConfig& cfg,
                                  const PrescribedClock& clock) {
  if (times.empty() || times.size() != es_norms.size() ||
      times.size() != etilde_norms.size())
    throw Error(ErrorCode::kEmptyTrajectory, "chain monitor needs samples");
  MonitorReport rep;
  rep.name = "chain_decay";
  const double rate = cfg.v1 / (4.0 * cfg.m);
  double c_fit = 0.0, sup_e = 0.0;
  double t_fit = times[0];
  for (std::size_t k = 0; k < times.size(); ++k) {
    // |e_s| / kappa = |e_s| exp(+rate int alpha_x).
    const double w = gain_time_integral(clock, cfg.alpha_x, times[k]);
    const double c = es_norms[k] > 0.0
                         ? std::exp(std::log(es_norms[k]) + rate * w)
                         : 0.0;
    if (c > c_fit) {
      c_fit = c;
      t_fit = times[k];
    }
    sup_e = std::max(sup_e, etilde_norms[k]);
  }
  rep.pass = std::isfinite(c_fit) && std::isfinite(sup_e);
  rep.max_ratio = c_fit;
  if (!rep.pass) rep.first_violation_t = t_fit;
  rep.extras.push_back({"C_fit", c_fit});
  rep.extras.push_back({"C_fit_t", t_fit});
  rep.extras.push_back({"sup_e_tilde_s", sup_e});
  rep.extras.push_back({"rate", rate});
  return rep;
}

}  // namespace dptco
