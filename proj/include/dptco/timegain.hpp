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

// Time-varying gain calculus: the blow-up gain mu(t) = 1/(T + t0 - t),
// class-K-infinity gain functions of mu, the kappa decay factor and the
// pointwise growth-criterion checker.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dptco {

class PrescribedClock {
 public:
  PrescribedClock(double t0, double horizon, double guard_frac = 0.999);

  double t0() const noexcept { return t0_; }
  double horizon() const noexcept { return horizon_; }
  double guard_frac() const noexcept { return guard_frac_; }
  double deadline() const noexcept { return t0_ + horizon_; }
  double guard_time() const noexcept { return t0_ + guard_frac_ * horizon_; }

  /// mu at t; throws kTimeOutOfWindow outside [t0, t0 + T).
  double mu(double t) const;
  double mu0() const noexcept { return 1.0 / horizon_; }
  double mu_guard() const noexcept {
    return 1.0 / (horizon_ * (1.0 - guard_frac_));
  }
  bool in_window(double t) const noexcept {
    return t >= t0_ && t < deadline();
  }

 private:
  double t0_;
  double horizon_;
  double guard_frac_;
};

enum class GainFamily {
  kLinear,     // k s
  kPower,      // k s^a
  kLog,        // k s ln(s + 2)
  kExp,        // k1 s exp(k2 s)
  kExpPlain,   // k exp(a s); not class K-infinity, override use only
  kTable,      // piecewise linear through (0,0) and the listed knots
  kDc2,        // alpha_x(s)^m exp((v1/2) int_{mu0}^{s} tau^-2 alpha_x)
};

const char* gain_family_name(GainFamily f) noexcept;
std::optional<GainFamily> parse_gain_family(const std::string& name);

/// Scalar gain alpha(s) together with its derivative. Immutable value type.
class GainFunction {
 public:
  static GainFunction linear(double k);
  static GainFunction power(double k, double a);
  static GainFunction log(double k);
  static GainFunction exp(double k1, double k2);
  static GainFunction exp_plain(double k, double a);
  /// `knots` is flat [s0, a0, s1, a1, ...] with strictly increasing s.
  static GainFunction table(std::vector<double> knots);
  /// Builds from a family tag and the flat parameter list used in scenario
  /// files. Throws kConfigError on bad arity or values.
  static GainFunction from_params(GainFamily family,
                                  const std::vector<double>& params);

  double operator()(double s) const;
  double deriv(double s) const;

  GainFamily family() const noexcept { return family_; }
  const std::vector<double>& params() const noexcept { return params_; }
  /// alpha(0) == 0 and strictly increasing by construction of the family.
  bool class_k_infinity() const noexcept;
  /// s^-2 alpha(s) integrates in closed form (linear, power).
  bool has_closed_form_integral() const noexcept;

  /// int_{a}^{b} alpha(s) / s^2 ds; closed form when available, otherwise
  /// adaptive Simpson in log s (rel. tol 1e-9, subdivision cap 2^20).
  double weighted_integral(double a, double b) const;

  /// alpha'(s) s^2 / alpha(s), the log-derivative rate used by the
  /// controllers' time-varying transformations.
  double delta(double s) const;

 private:
  friend GainFunction alpha_s_from_dc2(const GainFunction&, double, int,
                                       double);
  struct Dc2Data;

  GainFunction(GainFamily f, std::vector<double> p)
      : family_(f), params_(std::move(p)) {}

  GainFamily family_;
  std::vector<double> params_;
  std::shared_ptr<const Dc2Data> dc2_;
};

/// int_{t0}^{t} alpha(mu(tau)) d tau, i.e. int_{mu0}^{mu(t)} alpha(s)/s^2 ds.
double gain_time_integral(const PrescribedClock& clock,
                          const GainFunction& alpha, double t);

/// kappa(iota alpha(mu)) = exp(iota int_{t0}^{t} alpha(mu(tau)) d tau).
double kappa(const PrescribedClock& clock, const GainFunction& alpha,
             double iota, double t);

/// s -> alpha_x(s)^m exp((v1/2) int_{mu0}^{s} tau^-2 alpha_x(tau) d tau).
GainFunction alpha_s_from_dc2(const GainFunction& alpha_x, double v1, int m,
                              double mu0);

/// Adaptive Simpson quadrature with relative tolerance and subdivision cap;
/// throws kQuadratureFailure if the cap is hit before the tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol = 1e-9,
                        long max_intervals = 1L << 20);

enum class CriterionKind { kGenerator, kChainDc1, kStrictDcXi };

const char* criterion_kind_name(CriterionKind k) noexcept;

/// dalpha/ds <= C s^-2 alpha(s)^2 with an optional coupling
/// alpha_sub(s) <= coef * alpha_main(s).
struct GrowthCriterion {
  CriterionKind kind;
  double c_star = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;
  int L2 = 0;
  std::optional<GainFunction> coupling_main;

  static GrowthCriterion generator(double c_star);
  static GrowthCriterion chain_dc1(double v1, double v2, double c_star,
                                   std::optional<GainFunction> alpha);
  static GrowthCriterion strict_dc_xi(double c_star, int L2,
                                      std::optional<GainFunction> alpha);

  double growth_constant() const;
  double coupling_coefficient() const;
};

struct CriterionReport {
  bool pass = true;
  /// Minimum relative slack over the grid; negative means violated.
  double worst_margin = 0.0;
  double worst_s = 0.0;
  bool coupling_checked = false;
  bool coupling_pass = true;
  double coupling_worst_margin = 0.0;
  double coupling_worst_s = 0.0;
};

/// Relative slack accepted as "pass" to absorb round-off at exact
/// boundary cases such as k = 2/c*.
inline constexpr double kCriterionRoundoff = 1e-10;

std::vector<double> log_grid(double lo, double hi, std::size_t points = 1000);

CriterionReport check_growth_criterion(const GainFunction& alpha,
                                       const GrowthCriterion& crit,
                                       const std::vector<double>& grid);

}  // namespace dptco
