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
#include "dptco/costs.hpp"
#include "fixtures.hpp"

using namespace dptco;
using dptco::testing::example2_costs;

TEST_CASE("gradients match central differences") {
  CostSet costs = example2_costs();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& f : costs.agents()) {
    for (int k = 0; k < 100; ++k) {
      Vector z{0.5 + u(rng) * 0.7, 0.5 + u(rng) * 0.7};
      Vector g = f.gradient(z);
      for (std::size_t c = 0; c < 2; ++c) {
        const double h = 1e-6;
        Vector zp = z, zm = z;
        zp[c] += h;
        zm[c] -= h;
        const double fd = (f.value(zp) - f.value(zm)) / (2 * h);
        CHECK(std::abs(fd - g[c]) <= 1e-5 * std::max(1.0, std::abs(g[c])));
      }
    }
  }
}

TEST_CASE("grad_sum at minimizers") {
  CostSet one({CostFunction::quadratic(Matrix::identity(2), {0.3, -0.2})});
  CHECK(norm2(grad_sum(one, Vector{0.3, -0.2})) == 0.0);

  CostSet two({CostFunction::quadratic(Matrix::identity(1), {0.0}),
               CostFunction::quadratic(Matrix::identity(1), {2.0})});
  CHECK(grad_sum(two, Vector{1.0})[0] == 0.0);

  CHECK(norm2(grad_sum(example2_costs(), Vector{0.7263, 0.7183})) < 5e-3);
}

TEST_CASE("optimum oracle") {
  // Weighted mean of centres.
  CostSet w({CostFunction::quadratic(Matrix::identity(2), {1.0, 0.0}),
             CostFunction::quadratic(3.0 * Matrix::identity(2), {0.0, 2.0})});
  auto c = optimum_oracle(w, 1e-12, Vector{0.0, 0.0});
  CHECK(c.z[0] == doctest::Approx(0.25));
  CHECK(c.z[1] == doctest::Approx(1.5));

  auto ex2 = optimum_oracle(example2_costs(), 1e-8, Vector{0.0, 0.0});
  CHECK(std::abs(ex2.z[0] - 0.7263) < 1e-3);
  CHECK(std::abs(ex2.z[1] - 0.7183) < 1e-3);
  CHECK(ex2.grad_norm <= 1e-8);

  // Formation cost: 0.5|y + w - 0|^2 + 0.1|y + w - y0|^2 per agent.
  const double r = 1.0;
  std::vector<Vector> y0 = {{0, 0}, {-1, 0}, {0, -1}, {1, 0}, {0, 1}, {-1, -2}};
  std::vector<CostFunction> agents;
  for (int i = 0; i < 6; ++i) {
    Vector w_i{r * std::cos(M_PI * i / 3), r * std::sin(M_PI * i / 3)};
    agents.emplace_back(
        2,
        std::vector<QuadraticTerm>{
            {0.5 * Matrix::identity(2), {-w_i[0], -w_i[1]}, 0.0},
            {0.1 * Matrix::identity(2),
             {y0[i][0] - w_i[0], y0[i][1] - w_i[1]},
             0.0}});
  }
  auto ex1 = optimum_oracle(CostSet(agents), 1e-12, Vector{0.0, 0.0});
  CHECK(ex1.z[0] == doctest::Approx(-1.0 / 36.0).epsilon(1e-9));
  CHECK(ex1.z[1] == doctest::Approx(-2.0 / 36.0).epsilon(1e-9));
}

TEST_CASE("constant estimation") {
  auto q = CostFunction::quadratic(Matrix{{0.5, 0.0}, {0.0, 0.3}}, {0.0, 0.0});
  auto c = estimate_constants(q, Box::cube(2, -1, 1), 400);
  CHECK(c.rho <= 0.6);
  CHECK(c.rho >= 0.6 - 1e-3);
  CHECK(c.varrho >= 1.0);
  CHECK(c.varrho <= 1.0 + 1e-3);
  auto an = q.analytic_constants();
  REQUIRE(an.has_value());
  CHECK(an->first == doctest::Approx(0.6));
  CHECK(an->second == doctest::Approx(1.0));

  auto id = estimate_constants(
      CostFunction::quadratic(Matrix::identity(2), {0.0, 0.0}),
      Box::cube(2, -1, 1), 400);
  CHECK(id.rho == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(id.varrho == doctest::Approx(2.0).epsilon(1e-6));

  CostSet ex2 = example2_costs();
  auto e = estimate_constants(ex2.agent(0), ex2.box(), 400);
  CHECK(e.rho > 0.0);
  CHECK(std::isfinite(e.varrho));
  auto agg = aggregate_constants(ex2, 400);
  CHECK(agg.rho > 0.0);
  CHECK(agg.varrho >= agg.rho);
  CHECK_FALSE(agg.analytic);
}
