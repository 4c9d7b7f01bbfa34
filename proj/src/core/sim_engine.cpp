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
#include "dptco/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dptco/errors.hpp"
#include "dptco/generator.hpp"

namespace dptco {

void SolverSettings::validate() const {
  auto bad = [](const std::string& what) {
    throw ConfigError(ErrorCode::kConfigError, "solver: " + what);
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("dt must be > 0");
  if (!(abs_tol > 0.0 && abs_tol < 1e-2)) bad("abs_tol must lie in (0, 1e-2)");
  if (!(rel_tol > 0.0 && rel_tol < 1e-2)) bad("rel_tol must lie in (0, 1e-2)");
  if (!(dt_max > 0.0)) bad("dt_max must be > 0");
  if (!(ceiling_coef > 0.0)) bad("ceiling_coef must be > 0");
  if (max_steps < 1) bad("max_steps must be >= 1");
  if (log_stride < 1) bad("log_stride must be >= 1");
}

namespace {

std::size_t first_non_finite(std::span<const double> y) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (!std::isfinite(y[i])) return i;
  return y.size();
}

/// Calls the observer every `stride` accepted steps and once at the end.
class LogGate {
 public:
  LogGate(const OdeObserver& obs, long stride) : obs_(obs), stride_(stride) {}
  void step(long accepted, double t, std::span<const double> y) {
    if (accepted % stride_ == 0) {
      obs_(t, y);
      last_ = accepted;
    }
  }
  void finish(long accepted, double t, std::span<const double> y) {
    if (last_ != accepted) obs_(t, y);
  }

 private:
  const OdeObserver& obs_;
  long stride_;
  long last_ = 0;
};

IntegrationStats integrate_rk4(const OdeRhs& f, const PrescribedClock& clock,
                               std::span<const double> y0,
                               const SolverSettings& s,
                               const OdeObserver& observer) {
  const std::size_t d = y0.size();
  const double t0 = clock.t0(), tg = clock.guard_time();
  const double span = tg - t0;
  double raw = span / s.dt;
  long steps = static_cast<long>(std::llround(raw));
  if (std::fabs(raw - static_cast<double>(steps)) > 1e-9 * raw)
    steps = static_cast<long>(std::ceil(raw));
  steps = std::max(steps, 1L);
  if (steps > s.max_steps)
    throw Error(ErrorCode::kStepUnderflow, "RK4 step budget exceeded");

  Vector y(y0.begin(), y0.end()), k1(d), k2(d), k3(d), k4(d), tmp(d);
  IntegrationStats st;
  LogGate gate(observer, s.log_stride);
  observer(t0, y);
  double t = t0;
  for (long k = 1; k <= steps; ++k) {
    const double tn = k == steps ? tg : t0 + static_cast<double>(k) * s.dt;
    const double h = tn - t;
    f(t, y, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    f(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    f(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * k3[i];
    f(tn, tmp, k4);
    for (std::size_t i = 0; i < d; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    st.rhs_evals += 4;
    t = tn;
    if (std::size_t c = first_non_finite(y); c < d)
      throw NonFiniteStateError(t, c);
    ++st.accepted;
    gate.step(st.accepted, t, y);
  }
  gate.finish(st.accepted, t, y);
  st.t_final = t;
  return st;
}

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                 kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33,
                 kA63 = 46732.0 / 5247, kA64 = 49.0 / 176,
                 kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

IntegrationStats integrate_rk45(const OdeRhs& f, const PrescribedClock& clock,
                                std::span<const double> y0,
                                const SolverSettings& s,
                                const OdeObserver& observer) {
  const std::size_t d = y0.size();
  const double t0 = clock.t0(), tg = clock.guard_time();
  const double h_min = 1e-15 * clock.horizon();
  auto ceiling = [&](double t) {
    const double mu = clock.mu(t);
    return std::min(s.dt_max, s.ceiling_coef / (mu * mu));
  };

  Vector y(y0.begin(), y0.end()), yn(d), tmp(d);
  Vector k1(d), k2(d), k3(d), k4(d), k5(d), k6(d), k7(d);
  IntegrationStats st;
  LogGate gate(observer, s.log_stride);
  observer(t0, y);

  double t = t0;
  double h = std::min(s.dt, ceiling(t0));
  f(t, y, k1);
  ++st.rhs_evals;
  while (t < tg) {
    if (st.accepted + st.rejected >= s.max_steps)
      throw Error(ErrorCode::kStepUnderflow, "RK45 step budget exceeded");
    h = std::min(h, ceiling(t));
    bool last = false;
    if (t + h >= tg || tg - (t + h) < 1e-12 * clock.horizon()) {
      h = tg - t;
      last = true;
    }
    if (h < h_min) {
      std::ostringstream os;
      os << "step " << h << " below 1e-15 T at t=" << t;
      throw Error(ErrorCode::kStepUnderflow, os.str());
    }

    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + h * kA21 * k1[i];
    f(t + kC2 * h, tmp, k2);
    for (std::size_t i = 0; i < d; ++i)
      tmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
    f(t + kC3 * h, tmp, k3);
    for (std::size_t i = 0; i < d; ++i)
      tmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
    f(t + kC4 * h, tmp, k4);
    for (std::size_t i = 0; i < d; ++i)
      tmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] +
                           kA54 * k4[i]);
    f(t + kC5 * h, tmp, k5);
    for (std::size_t i = 0; i < d; ++i)
      tmp[i] = y[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] +
                           kA64 * k4[i] + kA65 * k5[i]);
    const double t_new = last ? tg : t + h;
    f(t_new, tmp, k6);
    for (std::size_t i = 0; i < d; ++i)
      yn[i] = y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] +
                          kB5 * k5[i] + kB6 * k6[i]);
    f(t_new, yn, k7);
    st.rhs_evals += 6;

    double err = 0.0;
    const std::size_t bad = first_non_finite(yn);
    bool finite = bad == d && first_non_finite(k7) == d;
    if (finite) {
      for (std::size_t i = 0; i < d; ++i) {
        const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] +
                              kE5 * k5[i] + kE6 * k6[i] + kE7 * k7[i]);
        const double sc =
            s.abs_tol + s.rel_tol * std::max(std::fabs(y[i]), std::fabs(yn[i]));
        err = std::max(err, std::fabs(e) / sc);
      }
      finite = std::isfinite(err);
    }
    if (!finite) {
      ++st.rejected;
      if (0.1 * h < h_min) throw NonFiniteStateError(t_new, bad < d ? bad : 0);
      h *= 0.1;
      continue;
    }
    if (err <= 1.0) {
      t = t_new;
      y.swap(yn);
      k1.swap(k7);
      ++st.accepted;
      gate.step(st.accepted, t, y);
      const double fac =
          err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      ++st.rejected;
      h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
    }
  }
  gate.finish(st.accepted, t, y);
  st.t_final = t;
  return st;
}

}  // namespace

IntegrationStats integrate_ode(const OdeRhs& f, const PrescribedClock& clock,
                               std::span<const double> y0,
                               const SolverSettings& settings,
                               const OdeObserver& observer) {
  settings.validate();
  if (std::size_t c = first_non_finite(y0); c < y0.size())
    throw NonFiniteStateError(clock.t0(), c);
  return settings.method == SolverMethod::kRk4
             ? integrate_rk4(f, clock, y0, settings, observer)
             : integrate_rk45(f, clock, y0, settings, observer);
}

// ---------------------------------------------------------------------------
// Disturbance signals.

namespace {

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_draw(std::uint64_t& state) {
  return static_cast<double>(splitmix(state) >> 11) * 0x1.0p-53;
}

constexpr int kNoiseModes = 8;

}  // namespace

void Disturbance::eval(double t, std::size_t agent, std::size_t n,
                       std::span<double> out) const {
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t k = 0; k < n; ++k) {
    switch (kind) {
      case DisturbanceKind::kNone:
        out[k] = 0.0;
        break;
      case DisturbanceKind::kConstant:
        out[k] = amplitude;
        break;
      case DisturbanceKind::kSinusoid:
        out[k] = amplitude *
                 std::sin(two_pi * frequency * t +
                          0.7 * static_cast<double>(agent * n + k));
        break;
      case DisturbanceKind::kNoise: {
        std::uint64_t st = seed * 0x100000001B3ULL + agent * 1315423911ULL +
                           k * 2654435761ULL;
        double acc = 0.0;
        for (int j = 0; j < kNoiseModes; ++j) {
          const double f = frequency * (0.5 + 1.5 * unit_draw(st));
          const double ph = two_pi * unit_draw(st);
          acc += std::sin(two_pi * f * t + ph);
        }
        out[k] = amplitude * acc / kNoiseModes;
        break;
      }
    }
  }
}

double Disturbance::bound() const noexcept {
  return kind == DisturbanceKind::kNone ? 0.0 : std::fabs(amplitude);
}

const char* disturbance_kind_name(DisturbanceKind k) noexcept {
  switch (k) {
    case DisturbanceKind::kNone: return "none";
    case DisturbanceKind::kConstant: return "constant";
    case DisturbanceKind::kSinusoid: return "sinusoid";
    case DisturbanceKind::kNoise: return "noise";
  }
  return "?";
}

DisturbanceKind parse_disturbance_kind(const std::string& name) {
  for (auto k : {DisturbanceKind::kNone, DisturbanceKind::kConstant,
                 DisturbanceKind::kSinusoid, DisturbanceKind::kNoise})
    if (name == disturbance_kind_name(k)) return k;
  throw ConfigError(ErrorCode::kConfigError,
                    "unknown disturbance kind '" + name + "'");
}

const char* plant_kind_name(PlantKind k) noexcept {
  switch (k) {
    case PlantKind::kNone: return "none";
    case PlantKind::kChain: return "chain";
    case PlantKind::kEulerLagrange: return "euler_lagrange";
    case PlantKind::kStrictFeedback: return "strict_feedback";
  }
  return "?";
}

PlantKind parse_plant_kind(const std::string& name) {
  for (auto k : {PlantKind::kNone, PlantKind::kChain, PlantKind::kEulerLagrange,
                 PlantKind::kStrictFeedback})
    if (name == plant_kind_name(k)) return k;
  throw ConfigError(ErrorCode::kConfigError,
                    "unknown plant kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// Two-link manipulator.

Matrix el_inertia(const ElParams& p, std::span<const double> x1) {
  const auto& th = p.theta;
  const double c = std::cos(x1[1]);
  const double off = th[1] + th[2] * c;
  return Matrix{{th[0] + th[1] + 2.0 * th[2] * c, off}, {off, th[3]}};
}

Matrix el_coriolis(const ElParams& p, std::span<const double> x1,
                   std::span<const double> x2) {
  const double s = p.theta[2] * std::sin(x1[1]);
  return Matrix{{-s * x2[0], -2.0 * s * x2[0]}, {0.0, s * x2[1]}};
}

Vector el_gravity(const ElParams& p, std::span<const double> x1) {
  const auto& th = p.theta;
  const double c12 = std::cos(x1[0] + x1[1]);
  return {th[4] * p.g * std::cos(x1[0]) + th[5] * p.g * c12,
          th[5] * p.g * c12};
}

// ---------------------------------------------------------------------------
// Coupled system.

std::size_t CoupledSystem::plant_dim() const noexcept {
  return plant == PlantKind::kNone ? 0 : static_cast<std::size_t>(order) * n;
}

std::size_t CoupledSystem::ctrl_dim() const noexcept {
  return plant == PlantKind::kStrictFeedback && strict ? strict->ctrl_dim()
                                                       : 0;
}

std::size_t CoupledSystem::state_dim() const noexcept {
  return 2 * gen_dim() + n_agents() * (plant_dim() + ctrl_dim());
}

std::size_t CoupledSystem::x_offset(std::size_t i) const noexcept {
  return 2 * gen_dim() + i * plant_dim();
}

std::size_t CoupledSystem::ctrl_offset(std::size_t i) const noexcept {
  return 2 * gen_dim() + n_agents() * plant_dim() + i * ctrl_dim();
}

std::size_t CoupledSystem::derived_per_agent() const noexcept {
  switch (plant) {
    case PlantKind::kNone: return 0;
    case PlantKind::kChain:
    case PlantKind::kEulerLagrange: return n + 2;
    case PlantKind::kStrictFeedback: return n + 3;
  }
  return 0;
}

void CoupledSystem::validate() const {
  auto mismatch = [](const std::string& what) {
    throw Error(ErrorCode::kDimensionMismatch, what);
  };
  const std::size_t N = n_agents(), m = costs.dim();
  if (costs.size() != N) mismatch("one cost per agent is required");
  if (varpi0.size() != N * m) mismatch("varpi0 must hold N*m values");
  if (p0.size() != N * m) mismatch("p0 must hold N*m values");
  if (plant == PlantKind::kNone) return;
  if (n != m) mismatch("agent stage dimension must equal the cost dimension");
  if (agents.size() != N) mismatch("one agent spec per network node");
  switch (plant) {
    case PlantKind::kChain:
      if (!chain) mismatch("chain plant needs a chain controller");
      if (chain->m != order || chain->n != n) mismatch("chain controller shape");
      break;
    case PlantKind::kEulerLagrange:
      if (!chain) mismatch("Euler-Lagrange plant needs a chain controller");
      if (order != 2 || n != 2 || chain->m != 2 || chain->n != 2)
        mismatch("Euler-Lagrange plant is a planar two-link arm");
      break;
    case PlantKind::kStrictFeedback:
      if (!strict) mismatch("strict-feedback plant needs its controller");
      if (strict->m != order || strict->n != n)
        mismatch("strict-feedback controller shape");
      break;
    case PlantKind::kNone:
      break;
  }
  for (const AgentSpec& a : agents) {
    if (a.x0.size() != plant_dim()) mismatch("agent x0 dimension");
    if (a.ctrl0.size() != ctrl_dim()) mismatch("agent controller state size");
    if (!a.offset.empty() && a.offset.size() != n)
      mismatch("formation offset dimension");
  }
}

Vector CoupledSystem::initial_state() const {
  validate();
  Vector y(state_dim(), 0.0);
  std::copy(varpi0.begin(), varpi0.end(), y.begin());
  std::copy(p0.begin(), p0.end(), y.begin() + gen_dim());
  for (std::size_t i = 0; i < agents.size() && plant != PlantKind::kNone;
       ++i) {
    std::copy(agents[i].x0.begin(), agents[i].x0.end(),
              y.begin() + x_offset(i));
    std::copy(agents[i].ctrl0.begin(), agents[i].ctrl0.end(),
              y.begin() + ctrl_offset(i));
  }
  return y;
}

Vector formation_offset_wrap(std::span<const double> varpi_i,
                             std::span<const double> omega_i) {
  if (omega_i.empty()) return Vector(varpi_i.begin(), varpi_i.end());
  if (omega_i.size() != varpi_i.size())
    throw Error(ErrorCode::kDimensionMismatch,
                "formation offset and reference differ in size");
  Vector out(varpi_i.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = varpi_i[k] + omega_i[k];
  return out;
}

Vector CoupledSystem::reference(std::span<const double> y,
                                std::size_t i) const {
  const std::size_t m = costs.dim();
  const Vector* off = i < agents.size() ? &agents[i].offset : nullptr;
  return formation_offset_wrap(y.subspan(i * m, m),
                               off ? std::span<const double>(*off)
                                   : std::span<const double>());
}

Vector CoupledSystem::control(double t, std::span<const double> y,
                              std::size_t i) const {
  const double mu = clock.mu(t);
  const Vector ref = reference(y, i);
  auto x = y.subspan(x_offset(i), plant_dim());
  switch (plant) {
    case PlantKind::kChain:
    case PlantKind::kEulerLagrange:
      return chain_control(x, ref, mu, *chain);
    case PlantKind::kStrictFeedback: {
      auto c = y.subspan(ctrl_offset(i), ctrl_dim());
      return sf_control(x, ref, c[0], c.subspan(1), mu, *strict);
    }
    case PlantKind::kNone:
      break;
  }
  return {};
}

void CoupledSystem::rhs(double t, std::span<const double> y,
                        std::span<double> dy) const {
  const double mu = clock.mu(t);
  const std::size_t g = gen_dim();
  generator_rhs(net, costs, alpha(mu), y.subspan(0, g), y.subspan(g, g),
                dy.subspan(0, g), dy.subspan(g, g));
  if (plant == PlantKind::kNone) return;

  Vector dist(n);
  for (std::size_t i = 0; i < n_agents(); ++i) {
    const std::size_t xo = x_offset(i);
    auto x = y.subspan(xo, plant_dim());
    auto dx = dy.subspan(xo, plant_dim());
    disturbance.eval(t, i, n, dist);
    const Vector ref = reference(y, i);
    const std::size_t last = (static_cast<std::size_t>(order) - 1) * n;
    for (std::size_t k = 0; k < last; ++k) dx[k] = x[k + n];

    switch (plant) {
      case PlantKind::kChain: {
        const Vector u = chain_control(x, ref, mu, *chain);
        for (std::size_t k = 0; k < n; ++k) dx[last + k] = u[k] + dist[k];
        break;
      }
      case PlantKind::kEulerLagrange: {
        const Vector u = chain_control(x, ref, mu, *chain);
        auto x1 = x.subspan(0, 2), x2 = x.subspan(2, 2);
        const Matrix Mh = el_inertia(el_nominal, x1);
        const Matrix Ch = el_coriolis(el_nominal, x1, x2);
        const Vector Gh = el_gravity(el_nominal, x1);
        const Vector Mu = Mh * std::span<const double>(u);
        const Vector Cx = Ch * x2;
        Vector torque(2);
        for (std::size_t k = 0; k < 2; ++k)
          torque[k] = Mu[k] + Cx[k] + Gh[k] + dist[k];
        const Matrix M = el_inertia(el_true, x1);
        const Vector Ctx = el_coriolis(el_true, x1, x2) * x2;
        const Vector G = el_gravity(el_true, x1);
        Vector rhs_v(2);
        for (std::size_t k = 0; k < 2; ++k)
          rhs_v[k] = torque[k] - Ctx[k] - G[k];
        const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
        dx[2] = (M(1, 1) * rhs_v[0] - M(0, 1) * rhs_v[1]) / det;
        dx[3] = (M(0, 0) * rhs_v[1] - M(1, 0) * rhs_v[0]) / det;
        break;
      }
      case PlantKind::kStrictFeedback: {
        const StrictFeedbackConfig& cfg = *strict;
        const std::size_t co = ctrl_offset(i);
        const double theta_hat = y[co];
        auto xi_f = y.subspan(co + 1, ctrl_dim() - 1);
        const VirtualControls vc =
            virtual_controls(x, ref, theta_hat, xi_f, mu, cfg);
        const double theta = agents[i].theta_true;
        for (std::size_t k = 0; k < n; ++k)
          dx[last + k] = vc.xi[last + k] + dist[k];
        Vector phi(n);
        for (std::size_t q = 2; q <= static_cast<std::size_t>(order); ++q) {
          const std::size_t o = (q - 1) * n;
          eval_phi(cfg.phi[q - 2], x.subspan(o, n), phi);
          for (std::size_t k = 0; k < n; ++k) dx[o + k] += theta * phi[k];
        }
        const Vector df = filter_rhs(xi_f, vc.xi, mu, cfg);
        const double tau = adaptation_tau(x, vc.x_tilde, mu, cfg);
        dy[co] = adaptation_rhs(theta_hat, tau, mu, cfg);
        std::copy(df.begin(), df.end(), dy.begin() + co + 1);
        break;
      }
      case PlantKind::kNone:
        break;
    }
  }
}

Vector CoupledSystem::derived(double t, std::span<const double> y) const {
  const std::size_t per = derived_per_agent();
  Vector out(n_agents() * per, 0.0);
  if (per == 0) return out;
  const double mu = clock.mu(t);
  for (std::size_t i = 0; i < n_agents(); ++i) {
    double* o = out.data() + i * per;
    const Vector ref = reference(y, i);
    auto x = y.subspan(x_offset(i), plant_dim());
    if (plant == PlantKind::kStrictFeedback) {
      const std::size_t co = ctrl_offset(i);
      const double theta_hat = y[co];
      auto xi_f = y.subspan(co + 1, ctrl_dim() - 1);
      const VirtualControls vc =
          virtual_controls(x, ref, theta_hat, xi_f, mu, *strict);
      const std::size_t last = (static_cast<std::size_t>(order) - 1) * n;
      for (std::size_t k = 0; k < n; ++k) o[k] = vc.xi[last + k];
      Vector e_s(x.begin(), x.end());
      for (std::size_t k = 0; k < n; ++k) e_s[k] -= ref[k];
      e_s.push_back(theta_hat);
      e_s.insert(e_s.end(), xi_f.begin(), xi_f.end());
      o[n] = norm2(e_s);
      o[n + 1] = scaled_errors(x, ref, theta_hat, xi_f, agents[i].theta_true,
                               mu, *strict)
                     .norm();
      o[n + 2] = adaptation_tau(x, vc.x_tilde, mu, *strict);
    } else {
      const Vector u = chain_control(x, ref, mu, *chain);
      for (std::size_t k = 0; k < n; ++k) o[k] = u[k];
      const ChainErrorView v = chain_error_view(x, ref, mu, *chain);
      o[n] = norm2(v.e_s);
      o[n + 1] = norm2(v.e_tilde_s);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trajectories.

std::vector<std::string> state_column_names(const CoupledSystem& sys) {
  std::vector<std::string> cols;
  const std::size_t N = sys.n_agents(), m = sys.costs.dim();
  auto name = [](std::size_t i, const std::string& ch, std::size_t k) {
    return "agent" + std::to_string(i) + "." + ch + std::to_string(k);
  };
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < m; ++k) cols.push_back(name(i, "varpi", k));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t k = 0; k < m; ++k) cols.push_back(name(i, "p", k));
  if (sys.plant == PlantKind::kNone) return cols;
  for (std::size_t i = 0; i < N; ++i)
    for (int q = 1; q <= sys.order; ++q)
      for (std::size_t k = 0; k < sys.n; ++k)
        cols.push_back(name(i, "x" + std::to_string(q) + "_", k));
  if (sys.ctrl_dim() == 0) return cols;
  for (std::size_t i = 0; i < N; ++i) {
    cols.push_back(name(i, "theta_hat", 0));
    for (int q = 2; q <= sys.order; ++q)
      for (std::size_t k = 0; k < sys.n; ++k)
        cols.push_back(name(i, "xif" + std::to_string(q) + "_", k));
  }
  return cols;
}

std::vector<std::string> derived_column_names(const CoupledSystem& sys) {
  std::vector<std::string> cols;
  if (sys.derived_per_agent() == 0) return cols;
  for (std::size_t i = 0; i < sys.n_agents(); ++i) {
    const std::string a = "agent" + std::to_string(i) + ".";
    for (std::size_t k = 0; k < sys.n; ++k)
      cols.push_back(a + "u" + std::to_string(k));
    cols.push_back(a + "es_norm0");
    cols.push_back(a + "etilde_norm0");
    if (sys.plant == PlantKind::kStrictFeedback) cols.push_back(a + "tau0");
  }
  return cols;
}

IntegrationResult integrate(const CoupledSystem& sys,
                            const SolverSettings& settings) {
  const Vector y0 = sys.initial_state();
  IntegrationResult res;
  res.traj.state_columns = state_column_names(sys);
  res.traj.derived_columns = derived_column_names(sys);
  auto f = [&sys](double t, std::span<const double> y, std::span<double> dy) {
    sys.rhs(t, y, dy);
  };
  auto obs = [&](double t, std::span<const double> y) {
    Vector d = sys.derived(t, y);
    if (std::size_t c = first_non_finite(d); c < d.size())
      throw NonFiniteStateError(t, y.size() + c);
    res.traj.times.push_back(t);
    res.traj.states.emplace_back(y.begin(), y.end());
    res.traj.derived.push_back(std::move(d));
  };
  res.stats = integrate_ode(f, sys.clock, y0, settings, obs);
  return res;
}

void export_csv(const Trajectory& traj, const PrescribedClock& clock,
                const std::string& path) {
  if (traj.size() == 0)
    throw Error(ErrorCode::kEmptyTrajectory, "nothing to export");
  std::FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::string line = "t,mu";
  for (const auto& c : traj.state_columns) line += "," + c;
  for (const auto& c : traj.derived_columns) line += "," + c;
  line += "\n";
  std::fputs(line.c_str(), fp);
  char buf[40];
  for (std::size_t r = 0; r < traj.size(); ++r) {
    line.clear();
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[r]);
    line += buf;
    std::snprintf(buf, sizeof buf, ",%.17g", clock.mu(traj.times[r]));
    line += buf;
    for (double v : traj.states[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      line += buf;
    }
    for (double v : traj.derived[r]) {
      std::snprintf(buf, sizeof buf, ",%.17g", v);
      line += buf;
    }
    line += "\n";
    std::fputs(line.c_str(), fp);
  }
  const bool ok = std::ferror(fp) == 0;
  if (std::fclose(fp) != 0 || !ok)
    throw Error(ErrorCode::kIoFailure, "write failed for " + path);
}

Trajectory import_csv(const std::string& path,
                      const std::vector<std::string>& state_columns,
                      const std::vector<std::string>& derived_columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path);
  std::string expected = "t,mu";
  for (const auto& c : state_columns) expected += "," + c;
  for (const auto& c : derived_columns) expected += "," + c;
  std::string line;
  if (!std::getline(in, line) || line != expected)
    throw Error(ErrorCode::kSchemaMismatch,
                "CSV header does not match the scenario's columns");

  Trajectory traj;
  traj.state_columns = state_columns;
  traj.derived_columns = derived_columns;
  const std::size_t ns = state_columns.size(), nd = derived_columns.size();
  const std::size_t width = 2 + ns + nd;
  std::size_t lineno = 1;
  bool saw_eof_newline = true;
  while (std::getline(in, line)) {
    ++lineno;
    saw_eof_newline = !in.eof();
    if (line.empty()) continue;
    Vector row;
    row.reserve(width);
    const char* p = line.c_str();
    while (true) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p)
        throw Error(ErrorCode::kSchemaMismatch,
                    "bad number on CSV line " + std::to_string(lineno));
      row.push_back(v);
      if (*end == ',') {
        p = end + 1;
      } else if (*end == '\0') {
        break;
      } else {
        throw Error(ErrorCode::kSchemaMismatch,
                    "bad separator on CSV line " + std::to_string(lineno));
      }
    }
    if (row.size() != width)
      throw Error(ErrorCode::kSchemaMismatch,
                  "CSV line " + std::to_string(lineno) + " has " +
                      std::to_string(row.size()) + " fields, expected " +
                      std::to_string(width));
    if (!traj.times.empty() && !(row[0] > traj.times.back()))
      throw Error(ErrorCode::kSchemaMismatch,
                  "CSV times not strictly increasing at line " +
                      std::to_string(lineno));
    traj.times.push_back(row[0]);
    traj.states.emplace_back(row.begin() + 2, row.begin() + 2 + ns);
    traj.derived.emplace_back(row.begin() + 2 + ns, row.end());
  }
  if (!saw_eof_newline)
    throw Error(ErrorCode::kSchemaMismatch,
                "CSV does not end with a newline (truncated)");
  if (traj.size() == 0)
    throw Error(ErrorCode::kSchemaMismatch, "CSV has no data rows");
  return traj;
}

}  // namespace dptco
