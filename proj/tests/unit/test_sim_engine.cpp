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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dptco/errors.hpp"
#include "dptco/sim_engine.hpp"
#include "fixtures.hpp"

using namespace dptco;
using dptco::testing::example2_costs;
using dptco::testing::outcome_of;

namespace {

std::string temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "dptco_unit";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

double solve_decay(const SolverSettings& s, double guard) {
  PrescribedClock clock(0.0, 1.0, guard);
  double last = 0.0;
  integrate_ode(
      [&](double t, std::span<const double> y, std::span<double> dy) {
        dy[0] = -clock.mu(t) * y[0];
      },
      clock, Vector{1.0}, s,
      [&](double, std::span<const double> y) { last = y[0]; });
  return last;
}

CoupledSystem generator_only(double horizon) {
  CoupledSystem sys;
  sys.net = ring_network(6);
  sys.costs = example2_costs();
  sys.clock = PrescribedClock(0.0, horizon, 0.99);
  sys.alpha = GainFunction::power(10.0, 1.5);
  sys.varpi0.assign(12, 0.0);
  for (std::size_t i = 0; i < 12; ++i) sys.varpi0[i] = 0.1 * double(i);
  sys.p0.assign(12, 0.0);
  return sys;
}

}  // namespace

TEST_CASE("RK45 matches the closed form of y' = -mu y") {
  SolverSettings s;
  s.abs_tol = 1e-12;
  s.rel_tol = 1e-10;
  CHECK(std::abs(solve_decay(s, 0.9) - 0.1) <= 1e-8);
}

TEST_CASE("RK4 converges at fourth order") {
  // y' = -mu^2 y, y = exp(-(mu - mu0)), at t = 0.9: exp(-9).
  auto err = [](double dt) {
    SolverSettings s;
    s.method = SolverMethod::kRk4;
    s.dt = dt;
    PrescribedClock clock(0.0, 1.0, 0.9);
    double last = 0.0;
    integrate_ode(
        [&](double t, std::span<const double> y, std::span<double> dy) {
          const double mu = clock.mu(t);
          dy[0] = -mu * mu * y[0];
        },
        clock, Vector{1.0}, s,
        [&](double, std::span<const double> y) { last = y[0]; });
    return std::abs(last - std::exp(-9.0));
  };
  const double e1 = err(0.9 / 200), e2 = err(0.9 / 400);
  CHECK(std::log2(e1 / e2) >= 3.7);
}

TEST_CASE("solver validation and failures") {
  SolverSettings bad;
  bad.abs_tol = 0.0;
  CHECK(outcome_of([&] { bad.validate(); }).code == ErrorCode::kConfigError);
  SolverSettings tiny;
  tiny.max_steps = 3;
  PrescribedClock clock(0.0, 1.0, 0.9);
  auto noop = [](double, std::span<const double>) {};
  CHECK(outcome_of([&] {
          integrate_ode(
              [](double, std::span<const double> y, std::span<double> dy) {
                dy[0] = -y[0];
              },
              clock, Vector{1.0}, tiny, noop);
        }).code == ErrorCode::kStepUnderflow);
  try {
    integrate_ode(
        [](double t, std::span<const double>, std::span<double> dy) {
          dy[0] = t > 0.2 ? std::nan("") : 1.0;
        },
        clock, Vector{1.0}, SolverSettings{}, noop);
    FAIL("expected a non-finite state error");
  } catch (const NonFiniteStateError& e) {
    CHECK(e.code() == ErrorCode::kNonFiniteState);
    CHECK(e.time() >= 0.19);
  }
}

TEST_CASE("the deadline is never evaluated") {
  PrescribedClock clock(2.0, 0.5, 0.999);
  double t_max = 0.0;
  SolverSettings s;
  integrate_ode(
      [&](double t, std::span<const double> y, std::span<double> dy) {
        t_max = std::max(t_max, t);
        dy[0] = -clock.mu(t) * y[0];
      },
      clock, Vector{1.0}, s, [](double, std::span<const double>) {});
  CHECK(t_max <= clock.guard_time());
  CHECK(t_max < clock.deadline());
}

TEST_CASE("generator-only system at equilibrium stays put") {
  CoupledSystem sys = generator_only(1.0);
  auto opt = optimum_oracle(sys.costs, 1e-13, Vector{0.0, 0.0});
  for (std::size_t i = 0; i < 6; ++i) {
    Vector g = sys.costs.agent(i).gradient(opt.z);
    for (std::size_t k = 0; k < 2; ++k) {
      sys.varpi0[i * 2 + k] = opt.z[k];
      sys.p0[i * 2 + k] = -g[k];
    }
  }
  SolverSettings s;
  s.log_stride = 10;
  auto r = integrate(sys, s);
  for (const auto& y : r.traj.states)
    for (std::size_t c = 0; c < y.size(); ++c)
      CHECK(std::abs(y[c] - r.traj.states.front()[c]) < 1e-9);
}

TEST_CASE("integration is deterministic and conserves sum p") {
  CoupledSystem sys = generator_only(1.0);
  SolverSettings s;
  auto a = integrate(sys, s);
  auto b = integrate(sys, s);
  REQUIRE(a.traj.size() == b.traj.size());
  CHECK(a.traj.times == b.traj.times);
  for (std::size_t k = 0; k < a.traj.size(); ++k)
    CHECK(a.traj.states[k] == b.traj.states[k]);
  for (const auto& y : a.traj.states)
    for (std::size_t c = 0; c < 2; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < 6; ++i) sum += y[12 + i * 2 + c];
      CHECK(std::abs(sum) <= 1e-8);
    }
}

TEST_CASE("generator converges to the optimum for several horizons") {
  const Vector z = optimum_oracle(example2_costs(), 1e-12, Vector{0, 0}).z;
  for (double T : {0.5, 1.0, 2.0}) {
    CoupledSystem sys = generator_only(T);
    SolverSettings s;
    s.log_stride = 50;
    auto r = integrate(sys, s);
    const auto& y = r.traj.states.back();
    double err = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
      err = std::max(err, std::hypot(y[i * 2] - z[0], y[i * 2 + 1] - z[1]));
    CHECK(err <= 1e-2);
    CHECK(r.traj.times.back() == doctest::Approx(0.99 * T));
  }
}

TEST_CASE("CSV round trip") {
  CoupledSystem sys = generator_only(1.0);
  SolverSettings s;
  s.log_stride = 7;
  auto r = integrate(sys, s);
  const std::string path = temp_path("roundtrip.csv");
  export_csv(r.traj, sys.clock, path);
  auto back = import_csv(path, r.traj.state_columns, r.traj.derived_columns);
  REQUIRE(back.size() == r.traj.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back.times[k] == r.traj.times[k]);
    CHECK(back.states[k] == r.traj.states[k]);
    CHECK(back.derived[k] == r.traj.derived[k]);
  }
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  const std::size_t commas = std::count(header.begin(), header.end(), ',');
  CHECK(commas + 1 == 2 + sys.state_dim() + sys.derived_per_agent() * 6);
  CHECK(header.rfind("t,mu,agent0.varpi0", 0) == 0);

  Trajectory two;
  two.state_columns = r.traj.state_columns;
  two.derived_columns = r.traj.derived_columns;
  for (int k = 0; k < 2; ++k) {
    two.times.push_back(0.1 * k);
    two.states.push_back(r.traj.states[k]);
    two.derived.push_back(r.traj.derived[k]);
  }
  const std::string p2 = temp_path("two.csv");
  export_csv(two, sys.clock, p2);
  std::ifstream in2(p2);
  std::size_t lines = 0;
  for (std::string line; std::getline(in2, line);) ++lines;
  CHECK(lines == 3);

  CHECK(outcome_of([&] { export_csv(Trajectory{}, sys.clock, p2); }).code ==
        ErrorCode::kEmptyTrajectory);
  auto wrong = r.traj.state_columns;
  wrong[0] = "bogus";
  CHECK(outcome_of([&] {
          import_csv(path, wrong, r.traj.derived_columns);
        }).code == ErrorCode::kSchemaMismatch);

  // Truncate mid-row.
  std::string text;
  {
    std::ifstream f(path, std::ios::binary);
    text.assign(std::istreambuf_iterator<char>(f), {});
  }
  {
    std::ofstream f(temp_path("trunc.csv"), std::ios::binary);
    f << text.substr(0, text.size() - 25);
  }
  CHECK(outcome_of([&] {
          import_csv(temp_path("trunc.csv"), r.traj.state_columns,
                     r.traj.derived_columns);
        }).code == ErrorCode::kSchemaMismatch);
  CHECK(outcome_of([&] {
          import_csv(temp_path("missing.csv"), r.traj.state_columns,
                     r.traj.derived_columns);
        }).code == ErrorCode::kIoFailure);
}

TEST_CASE("formation offset wrap") {
  Vector v{1.0, 2.0};
  CHECK(formation_offset_wrap(v, Vector{}) == v);
  CHECK(formation_offset_wrap(v, Vector{0.0, 0.0}) == v);
  CHECK(formation_offset_wrap(v, Vector{0.5, -1.0}) == Vector{1.5, 1.0});
  CHECK(outcome_of([&] { formation_offset_wrap(v, Vector{1.0}); }).code ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("disturbances stay within their bound and are seeded") {
  Disturbance d{DisturbanceKind::kNoise, 0.5, 1.0, 42};
  Disturbance e{DisturbanceKind::kNoise, 0.5, 1.0, 43};
  Vector a(2), b(2);
  bool differs = false;
  for (int k = 0; k < 500; ++k) {
    const double t = 0.002 * k;
    d.eval(t, 3, 2, a);
    e.eval(t, 3, 2, b);
    CHECK(norm_inf(a) <= d.bound());
    differs = differs || a != b;
  }
  CHECK(differs);
  Disturbance s{DisturbanceKind::kSinusoid, 2.0, 1.0, 1};
  s.eval(0.0, 0, 1, a);
  CHECK(a[0] == doctest::Approx(0.0));
  CHECK(Disturbance{}.bound() == 0.0);
  CHECK(parse_disturbance_kind("noise") == DisturbanceKind::kNoise);
  CHECK(outcome_of([] { parse_disturbance_kind("bogus"); }).code ==
        ErrorCode::kConfigError);
}

TEST_CASE("two-link arm model") {
  ElParams p;
  Vector q{0.3, 0.7}, qd{0.4, -1.1};
  Matrix M = el_inertia(p, q);
  CHECK(M(0, 1) == M(1, 0));
  CHECK(jacobi_eigen(M).values.front() > 0.0);
  CHECK(M(0, 0) == doctest::Approx(7.0 + 0.96 + 2.4 * std::cos(0.7)));
  CHECK(M(1, 1) == doctest::Approx(5.96));
  Matrix C = el_coriolis(p, q, qd);
  const double h = 1.2 * std::sin(0.7);
  CHECK(C(0, 0) == doctest::Approx(-h * 0.4));
  CHECK(C(0, 1) == doctest::Approx(-2 * h * 0.4));
  CHECK(C(1, 0) == 0.0);
  CHECK(C(1, 1) == doctest::Approx(h * -1.1));
  Vector G = el_gravity(p, q);
  CHECK(G[1] == doctest::Approx(1.2 * 9.8 * std::cos(1.0)));
  CHECK(G[0] == doctest::Approx(2.0 * 9.8 * std::cos(0.3) + G[1]));
}

TEST_CASE("system validation") {
  CoupledSystem sys = generator_only(1.0);
  sys.varpi0.pop_back();
  CHECK(outcome_of([&] { sys.validate(); }).code ==
        ErrorCode::kDimensionMismatch);
  CoupledSystem ok = generator_only(1.0);
  CHECK(ok.state_dim() == 24);
  CHECK(state_column_names(ok).size() == 24);
  CHECK(state_column_names(ok)[12] == "agent0.p0");
}
