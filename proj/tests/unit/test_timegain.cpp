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

#include "doctest.h"
#include "dptco/errors.hpp"
#include "dptco/timegain.hpp"

using namespace dptco;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("mu on the prescribed window") {
  PrescribedClock clock(0.0, 1.0);
  CHECK(clock.mu(0.0) == 1.0);
  CHECK(clock.mu(0.5) == 2.0);
  CHECK(code_of([&] { clock.mu(1.0); }) == ErrorCode::kTimeOutOfWindow);
  CHECK(code_of([&] { clock.mu(-0.1); }) == ErrorCode::kTimeOutOfWindow);
  CHECK(clock.mu_guard() == doctest::Approx(1000.0));
  PrescribedClock shifted(3.0, 2.0);
  CHECK(shifted.mu(3.0) == doctest::Approx(0.5));
}

TEST_CASE("mu derivative equals mu squared") {
  PrescribedClock clock(0.0, 1.0);
  const double h = 1e-6;
  for (double t : {0.0, 0.3, 0.7, 0.95}) {
    const double fd = (clock.mu(t + h) - clock.mu(t)) / h;
    const double mu = clock.mu(t);
    CHECK(std::abs(fd - mu * mu) / (mu * mu) < 1e-4);
  }
}

TEST_CASE("clock rejects bad horizon and guard") {
  CHECK(code_of([] { PrescribedClock(0.0, 0.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { PrescribedClock(0.0, 1.0, 1.0); }) ==
        ErrorCode::kInvalidArgument);
  CHECK(code_of([] { PrescribedClock(0.0, 1.0, 0.0); }) ==
        ErrorCode::kInvalidArgument);
}

TEST_CASE("gain derivatives match central differences on a log grid") {
  std::vector<GainFunction> gains = {
      GainFunction::linear(3.0), GainFunction::power(10.0, 1.5),
      GainFunction::log(2.0), GainFunction::exp(1.0, 0.01),
      GainFunction::table({1.0, 2.0, 5.0, 20.0})};
  for (const auto& g : gains) {
    CHECK(g(0.0) == 0.0);
    for (double s : log_grid(0.1, 200.0, 40)) {
      // Skip table knots where the derivative jumps.
      if (g.family() == GainFamily::kTable &&
          (std::abs(s - 1.0) < 1e-3 || std::abs(s - 5.0) < 1e-3))
        continue;
      const double h = 1e-5 * s;
      const double fd = (g(s + h) - g(s - h)) / (2 * h);
      CHECK(std::abs(fd - g.deriv(s)) <= 1e-6 * std::abs(g.deriv(s)) + 1e-9);
      CHECK(g(s * 1.01) > g(s));
    }
  }
}

TEST_CASE("kappa closed forms") {
  PrescribedClock clock(0.0, 1.0);
  auto two_s = GainFunction::linear(2.0);
  CHECK(kappa(clock, two_s, 0.0, 0.7) == 1.0);
  CHECK(kappa(clock, two_s, -1.0, 0.5) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(kappa(clock, GainFunction::power(10.0, 1.5), -3.0, 0.0) == 1.0);
  // Multiplicativity in iota.
  auto g = GainFunction::log(1.5);
  const double t = 0.8;
  CHECK(kappa(clock, g, -0.3, t) * kappa(clock, g, -0.5, t) ==
        doctest::Approx(kappa(clock, g, -0.8, t)).epsilon(1e-9));
  // Quadrature agrees with the closed form of the power family.
  auto p = GainFunction::power(2.0, 1.5);
  auto tab_like = GainFunction::exp(1.0, 1e-9);  // ~ s, numerical path
  CHECK(gain_time_integral(clock, p, 0.9) ==
        doctest::Approx(2.0 * 2.0 * (std::sqrt(10.0) - 1.0)).epsilon(1e-10));
  CHECK(gain_time_integral(clock, tab_like, 0.9) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-7));
}

TEST_CASE("dc2 gain closed form values") {
  auto a1 = alpha_s_from_dc2(GainFunction::linear(1.0), 2.0, 2, 1.0);
  CHECK(a1(std::exp(1.0)) == doctest::Approx(std::exp(3.0)).epsilon(1e-9));
  CHECK(a1(1.0) == doctest::Approx(1.0));
  auto a2 = alpha_s_from_dc2(GainFunction::power(1.0, 1.5), 2.0, 2, 1.0);
  CHECK(a2(4.0) == doctest::Approx(64.0 * std::exp(2.0)).epsilon(1e-9));
  // Derivative consistency for the composed gain.
  const double s = 3.0, h = 1e-5;
  CHECK((a2(s + h) - a2(s - h)) / (2 * h) ==
        doctest::Approx(a2.deriv(s)).epsilon(1e-6));
}

TEST_CASE("generator criterion boundary for the linear family") {
  const double c_star = 0.1;
  auto grid = log_grid(1.0, 1000.0);
  auto crit = GrowthCriterion::generator(c_star);
  CHECK(check_growth_criterion(GainFunction::linear(2.0 / c_star), crit, grid)
            .pass);
  auto at = check_growth_criterion(GainFunction::linear(2.0 / c_star), crit,
                                   grid);
  CHECK(std::abs(at.worst_margin) < 1e-9);
  CHECK_FALSE(
      check_growth_criterion(GainFunction::linear(1.0 / c_star), crit, grid)
          .pass);
  CHECK_FALSE(check_growth_criterion(
                  GainFunction::linear(2.0 / c_star * (1 - 1e-6)), crit, grid)
                  .pass);
}

TEST_CASE("chain dc1 coupling bound") {
  auto alpha = GainFunction::linear(100.0);
  auto crit = GrowthCriterion::chain_dc1(2.0, 4.0, 0.1, alpha);
  CHECK(crit.growth_constant() == doctest::Approx(0.25));
  CHECK(crit.coupling_coefficient() == doctest::Approx(0.05));
  auto grid = log_grid(1.0, 100.0, 50);
  auto ok = check_growth_criterion(GainFunction::linear(5.0), crit, grid);
  CHECK(ok.pass);
  CHECK(ok.coupling_checked);
  auto bad = check_growth_criterion(GainFunction::linear(6.0), crit, grid);
  CHECK_FALSE(bad.coupling_pass);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("adaptive simpson") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 3.0) ==
        doctest::Approx(9.0).epsilon(1e-12));
  CHECK(code_of([] {
          adaptive_simpson([](double x) { return std::sin(1.0 / x); }, 1e-9,
                           1.0, 1e-14, 64);
        }) == ErrorCode::kQuadratureFailure);
}
