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
#include <cmath>
#include <random>

#include "doctest.h"
#include "dptco/strictfb_ctrl.hpp"
#include "fixtures.hpp"

using namespace dptco;
using dptco::testing::outcome_of;

namespace {

StrictFeedbackConfig hand_config() {
  auto cfg = raw_parameters(2, 1, 1.0, {2.0, 2.0}, {3.0}, 2.0);
  cfg.phi = {PhiKind::kLinear};
  cfg.alpha_xi = GainFunction::linear(1.0);
  return cfg;
}

}  // namespace

TEST_CASE("parameter recipe") {
  auto cfg = select_parameters(3, 1, 1.0, 1.0, {10.0, 10.0}, {1.0, 1.0, 1.0},
                               {1.0, 1.0});
  CHECK(cfg.sigma == doctest::Approx(2.0));
  CHECK(cfg.L == Vector{4.0, 3.0, 2.0});
  CHECK(cfg.c[0] == doctest::Approx(6.5));
  CHECK(cfg.c[1] == doctest::Approx(6.0));
  CHECK(cfg.c[2] == doctest::Approx(5.0));
  CHECK(cfg.upsilon[0] == doctest::Approx(14.5));
  CHECK(cfg.upsilon[1] == doctest::Approx(13.5));
  auto ex2 = select_parameters(3, 1, 1.0, 17.0, {1.0, 1.0}, {5, 5, 5}, {5, 5});
  CHECK(ex2.sigma == doctest::Approx(10.0));
  CHECK(outcome_of([] {
          select_parameters(3, 1, 1.0, 1.0, {0.0, 10.0}, {1, 1, 1}, {1, 1});
        }).code == ErrorCode::kMarginTooSmall);
  CHECK(outcome_of([] {
          select_parameters(3, 1, 1.0, 1.0, {1.0, 1.0}, {0.5, 1, 1}, {1, 1});
        }).code == ErrorCode::kMarginTooSmall);
}

TEST_CASE("stage nonlinearities factor as psi(x) x") {
  Vector x{-2.0, -0.3, 0.0, 0.7, 5.0}, phi(5), psi(5);
  for (auto k : {PhiKind::kLinear, PhiKind::kSin, PhiKind::kTanh}) {
    eval_phi(k, x, phi);
    eval_psi_diag(k, x, psi);
    for (std::size_t i = 0; i < x.size(); ++i) {
      CHECK(std::abs(phi[i] - psi[i] * x[i]) <= 1e-10);
      CHECK(std::abs(psi[i]) <= 1.0);
    }
  }
}

TEST_CASE("virtual controls hand case") {
  auto cfg = hand_config();
  Vector zero2{0.0, 0.0}, ref{0.0};
  auto o = virtual_controls(zero2, ref, 0.0, Vector{0.0}, 1.0, cfg);
  for (double v : o.xi) CHECK(v == 0.0);

  auto vc = virtual_controls(Vector{1.0, 0.0}, ref, 1.0, Vector{0.5}, 1.0, cfg);
  CHECK(vc.x_tilde[0] == doctest::Approx(1.0));
  CHECK(vc.xi[0] == doctest::Approx(-2.0));
  CHECK(vc.x_tilde[1] == doctest::Approx(-0.5));
  CHECK(vc.xi_tilde[0] == doctest::Approx(2.5));
  CHECK(vc.xi[1] == doctest::Approx(-6.5));
  CHECK(sf_control(Vector{1.0, 0.0}, ref, 1.0, Vector{0.5}, 1.0, cfg)[0] ==
        doctest::Approx(-6.5));
  CHECK(sf_control(zero2, ref, 0.0, Vector{0.0}, 1.0, cfg)[0] == 0.0);
  CHECK(outcome_of([&] {
          StrictFeedbackConfig g = cfg;
          g.mu_guard = 10.0;
          virtual_controls(zero2, ref, 0.0, Vector{0.0}, 11.0, g);
        }).code == ErrorCode::kGuardExceeded);
}

TEST_CASE("virtual controls are affine in theta_hat") {
  auto cfg = raw_parameters(3, 2, 1.0, {3, 4, 5}, {6, 7}, 2.0);
  cfg.phi = {PhiKind::kSin, PhiKind::kTanh};
  cfg.alpha_xi = GainFunction::power(1.0, 1.5);
  Vector x{0.3, -0.2, 0.5, 0.1, -0.4, 0.8}, ref{0.1, 0.2}, xf{0.2, -0.1, 0.3, 0.0};
  const double h = 1e-6, mu = 1.7;
  auto a = virtual_controls(x, ref, 0.4 + h, xf, mu, cfg);
  auto b = virtual_controls(x, ref, 0.4 - h, xf, mu, cfg);
  // Explicit term -phi_q plus the chain through xi~_q = xi_qf - xi_{q-1}.
  Vector phi2(2), phi3(2);
  eval_phi(cfg.phi[0], std::span<const double>(x).subspan(2, 2), phi2);
  eval_phi(cfg.phi[1], std::span<const double>(x).subspan(4, 2), phi3);
  const double ax = cfg.alpha_xi(mu);
  for (std::size_t k = 0; k < 2; ++k) {
    const double d2 = (a.xi[2 + k] - b.xi[2 + k]) / (2 * h);
    const double d3 = (a.xi[4 + k] - b.xi[4 + k]) / (2 * h);
    CHECK(d2 == doctest::Approx(-phi2[k]).epsilon(1e-6));
    CHECK(d3 == doctest::Approx(-phi3[k] - cfg.upsilon[1] * ax * phi2[k])
                    .epsilon(1e-6));
  }
}

TEST_CASE("filter and adaptation") {
  auto cfg = raw_parameters(2, 1, 1.0, {10, 10}, {15.0}, 10.0);
  cfg.phi = {PhiKind::kLinear};
  cfg.alpha_xi = GainFunction::power(1.0, 1.5);
  CHECK(filter_rhs(Vector{0.0}, Vector{1.0, 0.0}, 1.0, cfg)[0] ==
        doctest::Approx(15.0));
  CHECK(filter_rhs(Vector{1.0}, Vector{1.0, 0.0}, 1.0, cfg)[0] == 0.0);
  CHECK(filter_rhs(Vector{2.0}, Vector{1.0, 0.0}, 4.0, cfg)[0] < 0.0);

  auto hc = hand_config();
  // L_2 = 2, alpha_xi(1) = 1, x~_2 = 2, phi_2(x_2) = 3.
  CHECK(adaptation_tau(Vector{0.0, 3.0}, Vector{0.0, 2.0}, 1.0, hc) ==
        doctest::Approx(6.0));
  CHECK(adaptation_rhs(0.0, 0.0, 1.0, hc) == 0.0);
  CHECK(adaptation_rhs(2.0, 0.0, 3.0, hc) ==
        doctest::Approx(-hc.sigma * 3.0 * 2.0));
}

TEST_CASE("scaled errors stacked form matches per-stage form") {
  auto cfg = raw_parameters(3, 2, 1.0, {3, 4, 5}, {6, 7}, 2.0);
  cfg.phi = {PhiKind::kSin, PhiKind::kLinear};
  cfg.alpha_xi = GainFunction::power(1.0, 1.5);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 30; ++k) {
    Vector x(6), ref(2), xf(4);
    for (auto& v : x) v = nd(rng);
    for (auto& v : ref) v = nd(rng);
    for (auto& v : xf) v = nd(rng);
    const double th = nd(rng), theta = 1.3, mu = 1.0 + 0.2 * k;
    auto a = scaled_errors(x, ref, th, xf, theta, mu, cfg);
    Vector es;
    for (std::size_t c = 0; c < 2; ++c) es.push_back(x[c] - ref[c]);
    for (std::size_t c = 2; c < 6; ++c) es.push_back(x[c]);
    es.push_back(th);
    for (double v : xf) es.push_back(v);
    auto b = scaled_errors_stacked(es, ref, theta, mu, cfg);
    CHECK(a.theta_tilde == doctest::Approx(theta - th));
    CHECK(a.norm() == doctest::Approx(b.norm()).epsilon(1e-10));
    double sq = a.theta_tilde * a.theta_tilde;
    for (double v : a.omega) sq += v * v;
    for (double v : a.eta) sq += v * v;
    CHECK(a.norm() == doctest::Approx(std::sqrt(sq)));
    // omega_1 = alpha_xi^{L_1} x~_1.
    CHECK(a.omega[0] ==
          doctest::Approx(std::pow(cfg.alpha_xi(mu), cfg.L[0]) * es[0]));
  }
}

TEST_CASE("invariant set monitor") {
  std::vector<double> t{0, 0.1, 0.2, 0.3}, zero(4, 0.0);
  auto z = invariant_set_monitor(t, zero, 1.0);
  CHECK(z.pass);
  std::vector<double> leave{0.5, 0.9, 1.5, 0.2};
  auto l = invariant_set_monitor(t, leave, 1.0);
  CHECK_FALSE(l.pass);
  CHECK(l.first_violation_t == doctest::Approx(0.2));
  CHECK(l.max_ratio == doctest::Approx(1.5));
  std::vector<double> edge{0.5, 1.01, 0.2, 0.2};
  CHECK(invariant_set_monitor(t, edge, 1.0).pass);
  CHECK(default_invariant_radius(2.0) == 5.0);
}

TEST_CASE("recipe check quantities") {
  auto cfg = select_parameters(3, 1, 1.0, 17.0, {1e4, 1e4}, {5, 5, 5}, {5, 5});
  auto r = check_recipe(cfg, 3.0, 10.0);
  CHECK(r.iota1 == doctest::Approx(10.0));
  CHECK(r.theta_term == doctest::Approx(10.0 * 9.0 / 20.0));
  CHECK(r.h_budget == doctest::Approx(12.5));
  CHECK(r.theta_ok);
}

TEST_CASE("theta hat bound and envelope fit") {
  auto cfg = raw_parameters(2, 1, 1.0, {10, 10}, {15.0}, 10.0);
  cfg.alpha_xi = GainFunction::power(1.0, 1.5);
  PrescribedClock clock(0.0, 1.0);
  std::vector<double> t, th, es;
  for (int k = 0; k < 50; ++k) {
    t.push_back(0.98 * k / 49.0);
    th.push_back(1.0 / cfg.alpha_xi(clock.mu(t.back())));
    es.push_back(2.0 / cfg.alpha_xi(clock.mu(t.back())));
  }
  CHECK(theta_hat_bound_check(t, th, 0.0, cfg, clock).pass);
  th[20] *= 3.0;
  CHECK_FALSE(theta_hat_bound_check(t, th, 0.0, cfg, clock).pass);
  auto fit = strict_envelope_fit(t, es, cfg, clock);
  CHECK(fit.pass);
  CHECK(fit.max_ratio == doctest::Approx(2.0));
}
