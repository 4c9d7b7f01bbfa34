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
#include "dptco/timegain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dptco/errors.hpp"

namespace dptco {

PrescribedClock::PrescribedClock(double t0, double horizon, double guard_frac)
    : t0_(t0), horizon_(horizon), guard_frac_(guard_frac) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw Error(ErrorCode::kInvalidArgument, "prescribed horizon T must be > 0");
  if (!(guard_frac > 0.0 && guard_frac < 1.0))
    throw Error(ErrorCode::kInvalidArgument, "guard_frac must lie in (0, 1)");
}

double PrescribedClock::mu(double t) const {
  if (!in_window(t)) {
    std::ostringstream os;
    os.precision(17);
    os << "t=" << t << " outside [" << t0_ << ", " << deadline() << ")";
    throw Error(ErrorCode::kTimeOutOfWindow, os.str());
  }
  return 1.0 / (horizon_ + t0_ - t);
}

const char* gain_family_name(GainFamily f) noexcept {
  switch (f) {
    case GainFamily::kLinear: return "linear";
    case GainFamily::kPower: return "power";
    case GainFamily::kLog: return "log";
    case GainFamily::kExp: return "exp";
    case GainFamily::kExpPlain: return "exp_plain";
    case GainFamily::kTable: return "table";
    case GainFamily::kDc2: return "dc2";
  }
  return "unknown";
}

std::optional<GainFamily> parse_gain_family(const std::string& name) {
  for (GainFamily f : {GainFamily::kLinear, GainFamily::kPower,
                       GainFamily::kLog, GainFamily::kExp,
                       GainFamily::kExpPlain, GainFamily::kTable}) {
    if (name == gain_family_name(f)) return f;
  }
  return std::nullopt;
}

struct GainFunction::Dc2Data {
  GainFunction alpha_x;
  double v1;
  int m;
  double mu0;
};

namespace {

[[noreturn]] void bad_gain(const std::string& what) {
  throw ConfigError(ErrorCode::kConfigError, "gain: " + what);
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    bad_gain(std::string(name) + " must be a positive finite number");
}

}  // namespace

GainFunction GainFunction::linear(double k) {
  require_positive(k, "linear k");
  return {GainFamily::kLinear, {k}};
}

GainFunction GainFunction::power(double k, double a) {
  require_positive(k, "power k");
  require_positive(a, "power exponent");
  return {GainFamily::kPower, {k, a}};
}

GainFunction GainFunction::log(double k) {
  require_positive(k, "log k");
  return {GainFamily::kLog, {k}};
}

GainFunction GainFunction::exp(double k1, double k2) {
  require_positive(k1, "exp k1");
  if (!(k2 >= 0.0) || !std::isfinite(k2)) bad_gain("exp k2 must be >= 0");
  return {GainFamily::kExp, {k1, k2}};
}

GainFunction GainFunction::exp_plain(double k, double a) {
  require_positive(k, "exp_plain k");
  require_positive(a, "exp_plain rate");
  return {GainFamily::kExpPlain, {k, a}};
}

GainFunction GainFunction::table(std::vector<double> knots) {
  if (knots.size() < 2 || knots.size() % 2 != 0)
    bad_gain("table needs [s0, a0, s1, a1, ...] pairs");
  double prev_s = 0.0, prev_a = 0.0;
  for (std::size_t i = 0; i < knots.size(); i += 2) {
    if (!(knots[i] > prev_s) || !(knots[i + 1] > prev_a))
      bad_gain("table knots must be strictly increasing in s and value");
    prev_s = knots[i];
    prev_a = knots[i + 1];
  }
  return {GainFamily::kTable, std::move(knots)};
}

GainFunction GainFunction::from_params(GainFamily family,
                                       const std::vector<double>& p) {
  auto arity = [&](std::size_t n) {
    if (p.size() != n) {
      std::ostringstream os;
      os << gain_family_name(family) << " expects " << n << " params, got "
         << p.size();
      bad_gain(os.str());
    }
  };
  switch (family) {
    case GainFamily::kLinear: arity(1); return linear(p[0]);
    case GainFamily::kPower: arity(2); return power(p[0], p[1]);
    case GainFamily::kLog: arity(1); return log(p[0]);
    case GainFamily::kExp: arity(2); return exp(p[0], p[1]);
    case GainFamily::kExpPlain: arity(2); return exp_plain(p[0], p[1]);
    case GainFamily::kTable: return table(p);
    case GainFamily::kDc2: break;
  }
  bad_gain("dc2 gains are derived, not parsed");
}

double GainFunction::operator()(double s) const {
  const auto& p = params_;
  switch (family_) {
    case GainFamily::kLinear: return p[0] * s;
    case GainFamily::kPower: return p[0] * std::pow(s, p[1]);
    case GainFamily::kLog: return p[0] * s * std::log(s + 2.0);
    case GainFamily::kExp: return p[0] * s * std::exp(p[1] * s);
    case GainFamily::kExpPlain: return p[0] * std::exp(p[1] * s);
    case GainFamily::kTable: {
      double s0 = 0.0, a0 = 0.0;
      const std::size_t n = p.size();
      for (std::size_t i = 0; i < n; i += 2) {
        if (s <= p[i] || i + 2 == n) {
          return a0 + (p[i + 1] - a0) * (s - s0) / (p[i] - s0);
        }
        s0 = p[i];
        a0 = p[i + 1];
      }
      return a0;
    }
    case GainFamily::kDc2: {
      const Dc2Data& d = *dc2_;
      const double ax = d.alpha_x(s);
      return std::pow(ax, d.m) *
             std::exp(0.5 * d.v1 * d.alpha_x.weighted_integral(d.mu0, s));
    }
  }
  return 0.0;
}

double GainFunction::deriv(double s) const {
  const auto& p = params_;
  switch (family_) {
    case GainFamily::kLinear: return p[0];
    case GainFamily::kPower: return p[0] * p[1] * std::pow(s, p[1] - 1.0);
    case GainFamily::kLog:
      return p[0] * (std::log(s + 2.0) + s / (s + 2.0));
    case GainFamily::kExp:
      return p[0] * std::exp(p[1] * s) * (1.0 + p[1] * s);
    case GainFamily::kExpPlain: return p[0] * p[1] * std::exp(p[1] * s);
    case GainFamily::kTable: {
      const double h = 1e-6 * std::max(s, 1e-300);
      return ((*this)(s + h) - (*this)(s - h)) / (2.0 * h);
    }
    case GainFamily::kDc2: {
      const Dc2Data& d = *dc2_;
      const double ax = d.alpha_x(s);
      const double dax = d.alpha_x.deriv(s);
      const double e =
          std::exp(0.5 * d.v1 * d.alpha_x.weighted_integral(d.mu0, s));
      const double axm1 = std::pow(ax, d.m - 1);
      return d.m * axm1 * dax * e + axm1 * ax * e * 0.5 * d.v1 * ax / (s * s);
    }
  }
  return 0.0;
}

bool GainFunction::class_k_infinity() const noexcept {
  return family_ != GainFamily::kExpPlain && family_ != GainFamily::kDc2;
}

bool GainFunction::has_closed_form_integral() const noexcept {
  return family_ == GainFamily::kLinear || family_ == GainFamily::kPower;
}

double GainFunction::weighted_integral(double a, double b) const {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error(ErrorCode::kInvalidArgument,
                "weighted gain integral needs positive limits");
  if (a == b) return 0.0;
  if (family_ == GainFamily::kLinear) return params_[0] * std::log(b / a);
  if (family_ == GainFamily::kPower) {
    const double k = params_[0], e = params_[1] - 1.0;
    if (std::abs(e) < 1e-14) return k * std::log(b / a);
    return k * (std::pow(b, e) - std::pow(a, e)) / e;
  }
  // Substituting s = exp(u) turns alpha(s)/s^2 ds into alpha(e^u) e^-u du,
  // which is smooth over the many decades mu spans near the deadline.
  auto f = [this](double u) {
    const double s = std::exp(u);
    return (*this)(s) / s;
  };
  return adaptive_simpson(f, std::log(a), std::log(b));
}

double GainFunction::delta(double s) const {
  return deriv(s) * s * s / (*this)(s);
}

double gain_time_integral(const PrescribedClock& clock,
                          const GainFunction& alpha, double t) {
  const double mu_t = clock.mu(t);
  return alpha.weighted_integral(clock.mu0(), mu_t);
}

double kappa(const PrescribedClock& clock, const GainFunction& alpha,
             double iota, double t) {
  const double mu_t = clock.mu(t);
  if (iota == 0.0) return 1.0;
  return std::exp(iota * alpha.weighted_integral(clock.mu0(), mu_t));
}

GainFunction alpha_s_from_dc2(const GainFunction& alpha_x, double v1, int m,
                              double mu0) {
  if (!(mu0 > 0.0)) bad_gain("dc2 needs mu0 > 0");
  if (!(v1 > 0.0)) bad_gain("dc2 needs v1 > 0");
  if (m < 1) bad_gain("dc2 needs order m >= 1");
  GainFunction out(GainFamily::kDc2, {v1, static_cast<double>(m), mu0});
  out.dc2_ = std::make_shared<const GainFunction::Dc2Data>(
      GainFunction::Dc2Data{alpha_x, v1, m, mu0});
  return out;
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  long intervals;
  long max_intervals;
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa,
                       double fm, double fb, double whole, double tol,
                       int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = st.f(lm), frm = st.f(rm);
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol || depth >= 60) {
    if (depth >= 60 && std::abs(diff) > 15.0 * tol)
      throw Error(ErrorCode::kQuadratureFailure,
                  "adaptive Simpson exceeded recursion depth");
    return left + right + diff / 15.0;
  }
  if (++st.intervals > st.max_intervals)
    throw Error(ErrorCode::kQuadratureFailure,
                "adaptive Simpson exceeded its subdivision cap");
  return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, long max_intervals) {
  if (a == b) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Coarse magnitude estimate from a 64-panel trapezoid sets the absolute
  // tolerance; Simpson refinement then works against it.
  double scale = 0.0;
  constexpr int kPanels = 64;
  for (int i = 0; i <= kPanels; ++i) {
    const double x = a + (b - a) * i / kPanels;
    scale += std::abs(f(x)) * ((i == 0 || i == kPanels) ? 0.5 : 1.0);
  }
  scale *= std::abs(b - a) / kPanels;
  const double tol = rel_tol * std::max(scale, 1e-300);
  SimpsonState st{f, 1, max_intervals};
  const double out = simpson_recurse(st, a, b, fa, fm, fb, whole, tol, 0);
  if (!std::isfinite(out))
    throw Error(ErrorCode::kQuadratureFailure, "non-finite quadrature value");
  return out;
}

const char* criterion_kind_name(CriterionKind k) noexcept {
  switch (k) {
    case CriterionKind::kGenerator: return "generator";
    case CriterionKind::kChainDc1: return "chain_dc1";
    case CriterionKind::kStrictDcXi: return "strict_dc_xi";
  }
  return "unknown";
}

GrowthCriterion GrowthCriterion::generator(double c_star) {
  if (!(c_star > 0.0))
    throw Error(ErrorCode::kNonPositiveInput, "c* must be positive");
  return {CriterionKind::kGenerator, c_star, 0.0, 0.0, 0, std::nullopt};
}

GrowthCriterion GrowthCriterion::chain_dc1(double v1, double v2, double c_star,
                                           std::optional<GainFunction> alpha) {
  if (!(v1 > 0.0) || !(v2 > 0.0) || !(c_star > 0.0))
    throw Error(ErrorCode::kNonPositiveInput, "DC1 constants must be positive");
  return {CriterionKind::kChainDc1, c_star, v1, v2, 0, std::move(alpha)};
}

GrowthCriterion GrowthCriterion::strict_dc_xi(
    double c_star, int L2, std::optional<GainFunction> alpha) {
  if (!(c_star > 0.0) || L2 <= 0)
    throw Error(ErrorCode::kNonPositiveInput,
                "DC_xi constants must be positive");
  return {CriterionKind::kStrictDcXi, c_star, 0.0, 0.0, L2, std::move(alpha)};
}

double GrowthCriterion::growth_constant() const {
  switch (kind) {
    case CriterionKind::kGenerator: return 0.5 * c_star;
    case CriterionKind::kChainDc1: return v1 / (2.0 * v2);
    case CriterionKind::kStrictDcXi: return 1.0;
  }
  return 0.0;
}

double GrowthCriterion::coupling_coefficient() const {
  switch (kind) {
    case CriterionKind::kGenerator: return 0.0;
    case CriterionKind::kChainDc1: return c_star / v1;
    case CriterionKind::kStrictDcXi: return c_star / (2.0 * L2);
  }
  return 0.0;
}

std::vector<double> log_grid(double lo, double hi, std::size_t points) {
  if (!(lo > 0.0) || !(hi >= lo) || points < 2)
    throw Error(ErrorCode::kInvalidArgument, "log_grid needs 0 < lo <= hi");
  std::vector<double> g(points);
  const double llo = std::log(lo), lhi = std::log(hi);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = std::exp(llo + (lhi - llo) * static_cast<double>(i) /
                              static_cast<double>(points - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

CriterionReport check_growth_criterion(const GainFunction& alpha,
                                       const GrowthCriterion& crit,
                                       const std::vector<double>& grid) {
  CriterionReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  rep.coupling_worst_margin = std::numeric_limits<double>::infinity();
  const double c = crit.growth_constant();
  const bool coupled = crit.coupling_main.has_value() &&
                       crit.kind != CriterionKind::kGenerator;
  rep.coupling_checked = coupled;
  for (double s : grid) {
    const double a = alpha(s);
    const double lhs = alpha.deriv(s);
    const double rhs = c * a * a / (s * s);
    const double denom = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    const double slack = (rhs - lhs) / denom;
    if (slack < rep.worst_margin) {
      rep.worst_margin = slack;
      rep.worst_s = s;
    }
    if (coupled) {
      const double bound = crit.coupling_coefficient() * (*crit.coupling_main)(s);
      const double cd = std::max({std::abs(a), std::abs(bound), 1e-300});
      const double cslack = (bound - a) / cd;
      if (cslack < rep.coupling_worst_margin) {
        rep.coupling_worst_margin = cslack;
        rep.coupling_worst_s = s;
      }
    }
  }
  if (!coupled) rep.coupling_worst_margin = 0.0;
  rep.coupling_pass = !coupled || rep.coupling_worst_margin >= -kCriterionRoundoff;
  rep.pass = rep.worst_margin >= -kCriterionRoundoff && rep.coupling_pass;
  return rep;
}

}  // namespace dptco
