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
#include "dptco/generator.hpp"
#include "fixtures.hpp"

using namespace dptco;
using dptco::testing::example2_costs;
using dptco::testing::outcome_of;

TEST_CASE("generator constants") {
  auto a = generator_constants(1, 1, 1, 4);
  CHECK(a.c1 == doctest::Approx(1.5));
  CHECK(a.c2 == doctest::Approx(0.1875));
  CHECK(a.c3 == doctest::Approx(2.5));
  CHECK(a.c_star == doctest::Approx(0.1));
  auto b = generator_constants(1, 1, 2, 2);
  CHECK(b.c2 == doctest::Approx(0.375));
  CHECK(b.c3 == doctest::Approx(2.5));
  auto c = generator_constants(0.5, 1, 1, 1);
  CHECK(c.c1 == doctest::Approx(3.0));
  CHECK(c.c2 == doctest::Approx(1.5));
  CHECK(c.c3 == doctest::Approx(4.0));
  CHECK(c.c_star == doctest::Approx(0.0625));
  CHECK(outcome_of([] { generator_constants(0, 1, 1, 1); }).code ==
        ErrorCode::kNonPositiveInput);
}

TEST_CASE("generator rhs hand case") {
  Network net = build_network(2, {{0, 1, 1.0}});
  CostSet costs({CostFunction::quadratic(Matrix::identity(1), {0.0}),
                 CostFunction::quadratic(Matrix::identity(1), {0.0})});
  Vector varpi{1.0, 0.0}, p{0.0, 0.0}, dv(2), dp(2);
  generator_rhs(net, costs, 1.0, varpi, p, dv, dp);
  CHECK(dv[0] == doctest::Approx(-3.0));
  CHECK(dv[1] == doctest::Approx(1.0));
  CHECK(dp[0] == doctest::Approx(1.0));
  CHECK(dp[1] == doctest::Approx(-1.0));
}

TEST_CASE("generator equilibrium and conservation") {
  Network net = ring_network(6);
  CostSet costs = example2_costs();
  auto opt = optimum_oracle(costs, 1e-13, Vector{0.0, 0.0});
  Vector varpi, p;
  for (std::size_t i = 0; i < 6; ++i) {
    Vector g = costs.agent(i).gradient(opt.z);
    for (std::size_t k = 0; k < 2; ++k) {
      varpi.push_back(opt.z[k]);
      p.push_back(-g[k]);
    }
  }
  Vector dv(12), dp(12);
  generator_rhs(net, costs, 7.0, varpi, p, dv, dp);
  CHECK(norm_inf(dv) < 1e-10);
  CHECK(norm_inf(dp) < 1e-10);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 20; ++k) {
    for (auto& v : varpi) v = nd(rng);
    for (auto& v : p) v = nd(rng);
    generator_rhs(net, costs, 2.5, varpi, p, dv, dp);
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < 6; ++i) s += dp[i * 2 + c];
      CHECK(std::abs(s) < 1e-12);
    }
  }
}

TEST_CASE("state form checks the window") {
  GeneratorState s{2, 1, {1.0, 0.0}, {0.0, 0.0}};
  Network net = build_network(2, {{0, 1, 1.0}});
  CostSet costs({CostFunction::quadratic(Matrix::identity(1), {0.0}),
                 CostFunction::quadratic(Matrix::identity(1), {0.0})});
  PrescribedClock clock(0.0, 1.0);
  auto d = generator_rhs(s, 0.5, net, costs, GainFunction::linear(0.5), clock);
  CHECK(d.varpi[0] == doctest::Approx(-3.0));
  CHECK(outcome_of([&] {
          generator_rhs(s, 1.0, net, costs, GainFunction::linear(1), clock);
        }).code == ErrorCode::kTimeOutOfWindow);
}

TEST_CASE("initial p") {
  Vector z = init_p(6, 2, InitPMode::kZeros);
  CHECK(norm_inf(z) == 0.0);
  Vector r = init_p(6, 2, InitPMode::kRandomZeroSum, 7);
  CHECK(norm_inf(r) > 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < 6; ++i) s += r[i * 2 + c];
    CHECK(std::abs(s) < 1e-15);
  }
  CHECK(norm_inf(init_p(1, 3, InitPMode::kRandomZeroSum, 7)) == 0.0);
}

TEST_CASE("Lyapunov function sandwich") {
  Network k2 = build_network(2, {{0, 1, 1.0}});
  auto c = generator_constants(2.0, 2.0, k2.lambda2(), k2.lambda_n());
  ErrorState e{{1.0, 1.0}, {0.0, 0.0}};
  CHECK(lyapunov_vr(e, k2, c) == doctest::Approx(c.c1 + 1.0));
  CHECK(lyapunov_vr(ErrorState{{0, 0}, {0, 0}}, k2, c) == 0.0);

  Network ring = ring_network(6);
  CostSet costs = example2_costs();
  auto kc = aggregate_constants(costs, 400);
  auto gc = generator_constants(kc.rho, kc.varrho, ring.lambda2(), ring.lambda_n());
  LyapunovVr V(ring, 2, gc);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 1000; ++k) {
    ErrorState r{Vector(12), Vector(12)};
    for (auto& v : r.e_varpi) v = nd(rng);
    for (auto& v : r.e_p) v = nd(rng);
    const double n2 = r.norm() * r.norm();
    const double v = V(r);
    CHECK(v >= gc.c2 * n2 * (1 - 1e-12));
    CHECK(v <= gc.c3 * n2 * (1 + 1e-12));
  }
  Network split = build_network(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  CHECK(outcome_of([&] { LyapunovVr bad(split, 1, gc); }).code ==
        ErrorCode::kDisconnected);
}

TEST_CASE("error state") {
  CostSet costs({CostFunction::quadratic(Matrix::identity(1), {1.0}),
                 CostFunction::quadratic(Matrix::identity(1), {-1.0})});
  Vector zs{0.0};
  ErrorState e = make_error_state(Vector{0.5, 0.0}, Vector{2.0, -2.0}, costs, zs);
  CHECK(e.e_varpi[0] == 0.5);
  // grad f^1(0) = -2, grad f^2(0) = 2.
  CHECK(e.e_p[0] == doctest::Approx(0.0));
  CHECK(e.e_p[1] == doctest::Approx(0.0));
}

TEST_CASE("envelope monitor") {
  PrescribedClock clock(0.0, 1.0);
  auto alpha = GainFunction::linear(2.0);
  auto gc = generator_constants(1, 1, 1, 4);
  std::vector<double> t, zero, bound;
  for (int k = 0; k < 200; ++k) {
    const double tk = 0.99 * k / 199.0;
    t.push_back(tk);
    zero.push_back(0.0);
    bound.push_back(std::sqrt(gc.c3 / gc.c2) * 1.0 *
                    kappa(clock, alpha, -gc.c_star, tk));
  }
  auto z = envelope_monitor(t, zero, clock, alpha, gc);
  CHECK(z.pass);
  CHECK(z.max_ratio == 0.0);
  bound[0] = 1.0;
  auto on = envelope_monitor(t, bound, clock, alpha, gc);
  CHECK(on.pass);
  CHECK(on.max_ratio == doctest::Approx(1.0).epsilon(1e-9));
  std::vector<double> bad = bound;
  bad[150] *= 1.2;
  auto off = envelope_monitor(t, bad, clock, alpha, gc);
  CHECK_FALSE(off.pass);
  CHECK(off.first_violation_t == doctest::Approx(t[150]));
}

TEST_CASE("Lyapunov decrease check") {
  PrescribedClock clock(0.0, 1.0);
  auto alpha = GainFunction::linear(1.0);
  const double cs = 0.5;
  std::vector<double> t, v;
  for (int k = 0; k < 100; ++k) {
    t.push_back(0.9 * k / 99.0);
    v.push_back(3.0 * kappa(clock, alpha, -2 * cs, t.back()));
  }
  CHECK(lyapunov_decrease_check(t, v, clock, alpha, cs).pass);
  v[50] = v[49];
  v[50] *= 1.1;
  auto r = lyapunov_decrease_check(t, v, clock, alpha, cs);
  CHECK_FALSE(r.pass);
  CHECK(r.first_violation_t == doctest::Approx(t[50]));
}
