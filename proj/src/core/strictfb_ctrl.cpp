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
#include "dptco/strictfb_ctrl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dptco/errors.hpp"

namespace dptco {

const char* phi_kind_name(PhiKind k) noexcept {
  switch (k) {
    case PhiKind::kLinear: return "linear";
    case PhiKind::kSin: return "sin";
    case PhiKind::kTanh: return "tanh";
  }
  return "unknown";
}

PhiKind parse_phi_kind(const std::string& name) {
  if (name == "linear") return PhiKind::kLinear;
  if (name == "sin") return PhiKind::kSin;
  if (name == "tanh") return PhiKind::kTanh;
  throw Error(ErrorCode::kConfigError, "unknown phi id '" + name + "'");
}

void eval_phi(PhiKind k, std::span<const double> x, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    switch (k) {
      case PhiKind::kLinear: out[i] = x[i]; break;
      case PhiKind::kSin: out[i] = std::sin(x[i]); break;
      case PhiKind::kTanh: out[i] = std::tanh(x[i]); break;
    }
  }
}

void eval_psi_diag(PhiKind k, std::span<const double> x,
                   std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    switch (k) {
      case PhiKind::kLinear: out[i] = 1.0; break;
      case PhiKind::kSin:
        out[i] = std::abs(v) < 1e-8 ? 1.0 - v * v / 6.0 : std::sin(v) / v;
        break;
      case PhiKind::kTanh:
        out[i] = std::abs(v) < 1e-8 ? 1.0 - v * v / 3.0 : std::tanh(v) / v;
        break;
    }
  }
}

namespace {

Vector scale_exponents(int m, double l) {
  Vector L(m);
  for (int q = 1; q <= m; ++q) L[q - 1] = m + l + 1.0 - q;
  return L;
}

void check_shape(int m, std::size_t n, double l) {
  if (m < 2 || n == 0)
    throw Error(ErrorCode::kInvalidArgument,
                "strict-feedback order m >= 2 and n >= 1 required");
  if (!(l > 0.0))
    throw Error(ErrorCode::kNonPositiveInput, "power offset l must be > 0");
}

void require_guard(double mu, const StrictFeedbackConfig& cfg) {
  if (mu > cfg.mu_guard) {
    std::ostringstream os;
    os.precision(17);
    os << "mu=" << mu << " exceeds the guard " << cfg.mu_guard;
    throw Error(ErrorCode::kGuardExceeded, os.str());
  }
}

}  // namespace

StrictFeedbackConfig select_parameters(int m, std::size_t n, double l,
                                       double sigma_prime, const Vector& rho,
                                       const Vector& c_bar,
                                       const Vector& upsilon_bar) {
  check_shape(m, n, l);
  if (!(sigma_prime > 0.0))
    throw Error(ErrorCode::kMarginTooSmall, "sigma' must be > 0");
  if (rho.size() != static_cast<std::size_t>(m - 1) ||
      upsilon_bar.size() != static_cast<std::size_t>(m - 1) ||
      c_bar.size() != static_cast<std::size_t>(m))
    throw Error(ErrorCode::kDimensionMismatch,
                "recipe needs m margins c_bar and m-1 values of rho, u_bar");
  StrictFeedbackConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.l = l;
  cfg.L = scale_exponents(m, l);
  cfg.sigma_prime = sigma_prime;
  cfg.sigma = 0.5 * (3.0 + sigma_prime);
  const double floor = 0.5 * cfg.sigma;
  for (double r : rho)
    if (!(r > 0.0))
      throw Error(ErrorCode::kMarginTooSmall, "filter margin rho_q must be > 0");
  for (double cb : c_bar)
    if (cb < floor)
      throw Error(ErrorCode::kMarginTooSmall, "c_bar_q must be >= sigma/2");
  for (double ub : upsilon_bar)
    if (ub < floor)
      throw Error(ErrorCode::kMarginTooSmall, "upsilon_bar_q must be >= sigma/2");
  cfg.rho = rho;
  cfg.c_bar = c_bar;
  cfg.upsilon_bar = upsilon_bar;
  cfg.c.resize(m);
  cfg.c[0] = c_bar[0] + cfg.L[0] + 1.5;
  for (int q = 2; q <= m; ++q) cfg.c[q - 1] = c_bar[q - 1] + cfg.L[q - 1] + 2.0;
  cfg.upsilon.resize(m - 1);
  for (int q = 2; q <= m; ++q)
    cfg.upsilon[q - 2] =
        upsilon_bar[q - 2] + cfg.L[q - 1] + rho[q - 2] + 0.5;
  cfg.phi.assign(m - 1, PhiKind::kLinear);
  return cfg;
}

StrictFeedbackConfig raw_parameters(int m, std::size_t n, double l,
                                    const Vector& c, const Vector& upsilon,
                                    double sigma) {
  check_shape(m, n, l);
  if (c.size() != static_cast<std::size_t>(m) ||
      upsilon.size() != static_cast<std::size_t>(m - 1))
    throw Error(ErrorCode::kDimensionMismatch,
                "raw gains need m values of c and m-1 of upsilon");
  for (double v : c)
    if (!(v > 0.0)) throw Error(ErrorCode::kNonPositiveInput, "c_q must be > 0");
  for (double v : upsilon)
    if (!(v > 0.0))
      throw Error(ErrorCode::kNonPositiveInput, "upsilon_q must be > 0");
  if (!(sigma > 0.0))
    throw Error(ErrorCode::kNonPositiveInput, "sigma must be > 0");
  StrictFeedbackConfig cfg;
  cfg.m = m;
  cfg.n = n;
  cfg.l = l;
  cfg.L = scale_exponents(m, l);
  cfg.c = c;
  cfg.upsilon = upsilon;
  cfg.sigma = sigma;
  cfg.sigma_prime = 2.0 * sigma - 3.0;
  cfg.raw_gains = true;
  cfg.phi.assign(m - 1, PhiKind::kLinear);
  return cfg;
}

VirtualControls virtual_controls(std::span<const double> x,
                                 std::span<const double> ref,
                                 double theta_hat,
                                 std::span<const double> xi_f, double mu,
                                 const StrictFeedbackConfig& cfg) {
  require_guard(mu, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  if (x.size() != m * n || ref.size() != n || xi_f.size() != (m - 1) * n)
    throw Error(ErrorCode::kDimensionMismatch,
                "strict-feedback state dimensions");
  const double a = cfg.alpha_xi(mu);
  VirtualControls vc{Vector(m * n), Vector(m * n), Vector((m - 1) * n)};
  for (std::size_t k = 0; k < n; ++k) {
    vc.x_tilde[k] = x[k] - ref[k];
    vc.xi[k] = -cfg.c[0] * a * vc.x_tilde[k];
  }
  Vector phi(n);
  for (std::size_t q = 2; q <= m; ++q) {
    const std::size_t o = (q - 1) * n, f = (q - 2) * n;
    eval_phi(cfg.phi[q - 2], x.subspan(o, n), phi);
    for (std::size_t k = 0; k < n; ++k) {
      vc.x_tilde[o + k] = x[o + k] - xi_f[f + k];
      vc.xi_tilde[f + k] = xi_f[f + k] - vc.xi[o - n + k];
      vc.xi[o + k] = -cfg.c[q - 1] * a * vc.x_tilde[o + k] -
                     theta_hat * phi[k] -
                     cfg.upsilon[q - 2] * a * vc.xi_tilde[f + k];
    }
  }
  return vc;
}

Vector filter_rhs(std::span<const double> xi_f, std::span<const double> xi,
                  double mu, const StrictFeedbackConfig& cfg) {
  require_guard(mu, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  if (xi_f.size() != (m - 1) * n || xi.size() < (m - 1) * n)
    throw Error(ErrorCode::kDimensionMismatch, "filter dimensions");
  const double a = cfg.alpha_xi(mu);
  Vector d((m - 1) * n);
  for (std::size_t q = 2; q <= m; ++q)
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t f = (q - 2) * n + k;
      d[f] = cfg.upsilon[q - 2] * a * (xi[(q - 2) * n + k] - xi_f[f]);
    }
  return d;
}

double adaptation_tau(std::span<const double> x,
                      std::span<const double> x_tilde, double mu,
                      const StrictFeedbackConfig& cfg) {
  require_guard(mu, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  const double a = cfg.alpha_xi(mu);
  Vector phi(n);
  double tau = 0.0;
  for (std::size_t q = 2; q <= m; ++q) {
    const std::size_t o = (q - 1) * n;
    eval_phi(cfg.phi[q - 2], x.subspan(o, n), phi);
    tau += std::pow(a, 2.0 * cfg.L[q - 1]) * dot(x_tilde.subspan(o, n), phi);
  }
  return tau;
}

double adaptation_rhs(double theta_hat, double tau, double mu,
                      const StrictFeedbackConfig& cfg) {
  require_guard(mu, cfg);
  return tau - cfg.sigma * cfg.alpha_xi(mu) * theta_hat;
}

Vector sf_control(std::span<const double> x, std::span<const double> ref,
                  double theta_hat, std::span<const double> xi_f, double mu,
                  const StrictFeedbackConfig& cfg) {
  const VirtualControls vc = virtual_controls(x, ref, theta_hat, xi_f, mu, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  return Vector(vc.xi.begin() + (m - 1) * n, vc.xi.end());
}

double ScaledErrors::norm() const {
  return std::sqrt(dot(omega, omega) + dot(eta, eta) +
                   theta_tilde * theta_tilde);
}

ScaledErrors scaled_errors(std::span<const double> x,
                           std::span<const double> ref, double theta_hat,
                           std::span<const double> xi_f, double theta,
                           double mu, const StrictFeedbackConfig& cfg) {
  const VirtualControls vc = virtual_controls(x, ref, theta_hat, xi_f, mu, cfg);
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  const double a = cfg.alpha_xi(mu);
  ScaledErrors se{Vector(m * n), Vector((m - 1) * n), theta - theta_hat};
  for (std::size_t q = 1; q <= m; ++q) {
    const double s = std::pow(a, cfg.L[q - 1]);
    for (std::size_t k = 0; k < n; ++k) {
      se.omega[(q - 1) * n + k] = s * vc.x_tilde[(q - 1) * n + k];
      if (q >= 2) se.eta[(q - 2) * n + k] = s * vc.xi_tilde[(q - 2) * n + k];
    }
  }
  return se;
}

ScaledErrors scaled_errors_stacked(std::span<const double> e_s,
                                   std::span<const double> ref, double theta,
                                   double mu, const StrictFeedbackConfig& cfg) {
  const std::size_t n = cfg.n, m = static_cast<std::size_t>(cfg.m);
  const std::size_t nm = n * m, dim = nm + 1 + n * (m - 1);
  if (e_s.size() != dim || ref.size() != n)
    throw Error(ErrorCode::kDimensionMismatch, "stacked e_s dimension");
  const double a = cfg.alpha_xi(mu);
  const Matrix In = Matrix::identity(n);

  // Lambda_1 = [I_nm, 0_{nm x 1}, [0_{n x n(m-1)}; -I_{n(m-1)}]] so that
  // Lambda_1 e_s = [x1 - ref; x_q - xi_qf].
  Matrix L1(nm, dim);
  for (std::size_t i = 0; i < nm; ++i) L1(i, i) = 1.0;
  for (std::size_t i = 0; i < n * (m - 1); ++i) L1(n + i, nm + 1 + i) = -1.0;
  Matrix L2(n * (m - 1), dim);
  for (std::size_t i = 0; i < n * (m - 1); ++i) L2(i, nm + 1 + i) = 1.0;
  Matrix L3(n * (m - 1), nm);
  for (std::size_t i = 0; i < n * (m - 1); ++i) L3(i, i) = 1.0;
  Matrix L4(1, dim);
  L4(0, nm) = 1.0;
  Vector phi1(m), phi2(m - 1);
  for (std::size_t q = 1; q <= m; ++q) {
    phi1[q - 1] = std::pow(a, cfg.L[q - 1]);
    if (q >= 2) phi2[q - 2] = phi1[q - 1];
  }
  const Matrix Phi1 = kron(Matrix::diagonal(phi1), In);
  const Matrix Phi2 = kron(Matrix::diagonal(phi2), In);

  // xi(e_s) needs the plant state and filter back from e_s.
  Vector x(e_s.begin(), e_s.begin() + nm);
  for (std::size_t k = 0; k < n; ++k) x[k] += ref[k];
  const double theta_hat = (L4 * e_s)[0];
  const Vector xi_f = L2 * e_s;
  const VirtualControls vc = virtual_controls(x, ref, theta_hat, xi_f, mu, cfg);

  ScaledErrors se;
  se.omega = Phi1 * std::span<const double>(L1 * e_s);
  const Vector xi_prev = L3 * std::span<const double>(vc.xi);
  Vector diff = xi_f;
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= xi_prev[i];
  se.eta = Phi2 * std::span<const double>(diff);
  se.theta_tilde = theta - theta_hat;
  return se;
}

MonitorReport invariant_set_monitor(std::span<const double> times,
                                    std::span<const double> etilde_norms,
                                    double h, double slack) {
  if (times.empty() || times.size() != etilde_norms.size())
    throw Error(ErrorCode::kEmptyTrajectory, "invariant-set monitor needs samples");
  if (!(h > 0.0))
    throw Error(ErrorCode::kNonPositiveInput, "invariant radius h must be > 0");
  MonitorReport rep;
  rep.name = "invariant_set";
  const bool premise = etilde_norms[0] <= h;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double r = etilde_norms[k] / h;
    rep.max_ratio = std::max(rep.max_ratio, std::isfinite(r) ? r : 1e308);
    if (premise && !(r <= 1.0 + slack) && rep.first_violation_t < 0.0)
      rep.first_violation_t = times[k];
  }
  rep.pass = rep.first_violation_t < 0.0;
  rep.extras.push_back({"h", h});
  rep.extras.push_back({"premise_holds", premise ? 1.0 : 0.0});
  rep.extras.push_back({"slack", slack});
  return rep;
}

double default_invariant_radius(double etilde0_norm) {
  return 2.0 * etilde0_norm + 1.0;
}

RecipeCheck check_recipe(const StrictFeedbackConfig& cfg, double theta,
                         double h) {
  RecipeCheck rc;
  // Raw gains are mapped back onto margins with rho_q = 0.
  double iota = cfg.sigma;
  for (int q = 1; q <= cfg.m; ++q) {
    const double cbar = cfg.c[q - 1] - cfg.L[q - 1] - (q == 1 ? 1.5 : 2.0);
    iota = std::min(iota, 2.0 * cbar);
  }
  for (int q = 2; q <= cfg.m; ++q) {
    const double rho = cfg.rho.empty() ? 0.0 : cfg.rho[q - 2];
    const double ubar = cfg.upsilon[q - 2] - cfg.L[q - 1] - rho - 0.5;
    iota = std::min(iota, 2.0 * ubar);
  }
  rc.iota1 = iota;
  rc.h_budget = h * h / 8.0;
  if (iota > 0.0) {
    rc.theta_term = cfg.sigma * theta * theta / (2.0 * iota);
    const double c1 = cfg.c[0];
    const double xi1 = c1 * c1 * h * h * (3.0 + c1) * (3.0 + c1);
    const double rho2 = cfg.rho.empty() ? 0.0 : cfg.rho[0];
    rc.xi1_term = rho2 > 0.0 ? xi1 / (rho2 * iota) : HUGE_VAL;
  } else {
    rc.theta_term = HUGE_VAL;
    rc.xi1_term = HUGE_VAL;
  }
  rc.theta_ok = rc.theta_term <= rc.h_budget;
  rc.xi1_ok = rc.xi1_term <= rc.h_budget;
  return rc;
}

MonitorReport strict_envelope_fit(std::span<const double> times,
                                  std::span<const double> es_norms,
                                  const StrictFeedbackConfig& cfg,
                                  const PrescribedClock& clock) {
  if (times.empty() || times.size() != es_norms.size())
    throw Error(ErrorCode::kEmptyTrajectory, "envelope fit needs samples");
  MonitorReport rep;
  rep.name = "strict_envelope";
  double c_fit = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    c_fit = std::max(c_fit, es_norms[k] * cfg.alpha_xi(clock.mu(times[k])));
  rep.pass = std::isfinite(c_fit);
  rep.max_ratio = c_fit;
  rep.extras.push_back({"C_fit", c_fit});
  return rep;
}

MonitorReport theta_hat_bound_check(std::span<const double> times,
                                    std::span<const double> theta_hat,
                                    double tau_max,
                                    const StrictFeedbackConfig& cfg,
                                    const PrescribedClock& clock) {
  if (times.empty() || times.size() != theta_hat.size())
    throw Error(ErrorCode::kEmptyTrajectory, "theta-hat check needs samples");
  MonitorReport rep;
  rep.name = "theta_hat_bound";
  const double a0 = cfg.alpha_xi(clock.mu0());
  const double sp = cfg.sigma_prime > 0.0 ? cfg.sigma_prime : 1e-300;
  const double num = a0 * std::abs(theta_hat[0]) + tau_max / std::sqrt(2.0 * sp);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double bound = num / cfg.alpha_xi(clock.mu(times[k]));
    const double r = bound > 0.0 ? std::abs(theta_hat[k]) / bound
                                 : (theta_hat[k] == 0.0 ? 0.0 : HUGE_VAL);
    rep.max_ratio = std::max(rep.max_ratio, r);
    if (r > 1.0 && rep.first_violation_t < 0.0) rep.first_violation_t = times[k];
  }
  rep.pass = rep.first_violation_t < 0.0;
  rep.extras.push_back({"tau_max", tau_max});
  return rep;
}

}  // namespace dptco
