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
#include <fstream>
#include <string>

#include "doctest.h"
#include "dptco/errors.hpp"
#include "dptco/scenario.hpp"
#include "fixtures.hpp"
#include "json.hpp"

using namespace dptco;
using dptco::testing::outcome_of;
using nlohmann::json;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(DPTCO_SCENARIO_DIR) + "/" + name;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

json scenario_json(const std::string& name) {
  return json::parse(read_text(scenario_path(name)));
}

/// Text of a small generator-only scenario with the given linear gain.
std::string tiny(double k, bool acknowledge = false) {
  json j = {
      {"name", "tiny"},
      {"clock", {{"T", 1.0}}},
      {"network", {{"agents", 3}, {"topology", "ring"}}},
      {"costs",
       {{"dim", 1},
        {"agents",
         json::array({json::array({{{"family", "quadratic"},
                                    {"Q", {{1.0}}},
                                    {"center", {0.0}}}}),
                      json::array({{{"family", "quadratic"},
                                    {"Q", {{1.0}}},
                                    {"center", {1.0}}}}),
                      json::array({{{"family", "quadratic"},
                                    {"Q", {{1.0}}},
                                    {"center", {2.0}}}})})}}},
      {"gains", {{"alpha", {{"family", "linear"}, {"params", {k}}}}}}};
  if (acknowledge) j["acknowledge_criteria_override"] = true;
  return j.dump(2);
}

}  // namespace

TEST_CASE("bundled scenarios load") {
  for (const char* name : {"example1.json", "example1_literal.json",
                           "example2.json", "generator_only.json"}) {
    CAPTURE(name);
    Scenario sc = load_scenario(scenario_path(name));
    CHECK(sc.hash.size() == 16);
    CHECK(sc.sys.n_agents() == 6);
    CHECK_NOTHROW(sc.sys.validate());
    CHECK(sc.gen_constants.c_star > 0.0);
  }
}

TEST_CASE("example 1 formation offsets form a centred hexagon") {
  Scenario sc = load_scenario(scenario_path("example1.json"));
  REQUIRE(sc.sys.plant == PlantKind::kEulerLagrange);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    const Vector& w = sc.sys.agents[i].offset;
    REQUIRE(w.size() == 2);
    CHECK(std::hypot(w[0], w[1]) == doctest::Approx(1.0));
    sx += w[0];
    sy += w[1];
  }
  CHECK(std::abs(sx) < 1e-12);
  CHECK(std::abs(sy) < 1e-12);
  // The generator gain was raised to the criterion boundary.
  CHECK(sc.alpha_raised);
  CHECK(sc.sys.alpha.params()[0] ==
        doctest::Approx(2.0 / sc.gen_constants.c_star));
}

TEST_CASE("example 2 scenario carries its raw gains") {
  Scenario sc = load_scenario(scenario_path("example2.json"));
  REQUIRE(sc.sys.strict.has_value());
  const auto& cfg = *sc.sys.strict;
  CHECK(cfg.m == 3);
  CHECK(cfg.sigma == doctest::Approx(10.0));
  CHECK(cfg.upsilon[0] == doctest::Approx(15.0));
  CHECK(cfg.upsilon[1] == doctest::Approx(20.0));
  CHECK(sc.sys.agents[3].theta_true == doctest::Approx(3.0));
}

TEST_CASE("hash is deterministic and content sensitive") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const std::string text = tiny(30.0);
  CHECK(parse_scenario(text, "a").hash == parse_scenario(text, "b").hash);
  CHECK(parse_scenario(text, "a").hash != parse_scenario(tiny(31.0), "a").hash);
}

TEST_CASE("generator criterion gate") {
  try {
    parse_scenario(tiny(1.0), "tiny.json");
    FAIL("expected a criterion violation");
  } catch (const ConfigError& e) {
    CHECK(e.code() == ErrorCode::kCriterionViolation);
    CHECK(std::string(e.what()).find("generator criterion") !=
          std::string::npos);
    CHECK(e.line() > 0);
  }
  Scenario ack = parse_scenario(tiny(1.0, true), "tiny.json");
  CHECK_FALSE(ack.overrides_used.empty());
  CHECK(ack.criteria.front().acknowledged);
  // The boundary value itself passes.
  Scenario probe = parse_scenario(tiny(1.0, true), "tiny.json");
  const double k = 2.0 / probe.gen_constants.c_star;
  Scenario at = parse_scenario(tiny(k), "tiny.json");
  CHECK(at.overrides_used.empty());
}

TEST_CASE("bad_gain fixture fails with a line number") {
  auto o = outcome_of([] {
    load_scenario(std::string(DPTCO_SCENARIO_DIR) +
                  "/../tests/cli/data/bad_gain.json");
  });
  CHECK(o.threw);
  CHECK(o.code == ErrorCode::kCriterionViolation);
}

TEST_CASE("config errors carry the offending line") {
  json j = json::parse(tiny(30.0));
  j["network"]["topology"] = "star";
  const std::string text = j.dump(2);
  try {
    parse_scenario(text, "x.json");
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(e.code() == ErrorCode::kConfigError);
    // Line of the "topology" key in the dumped text.
    std::size_t line = 1, pos = text.find("\"topology\"");
    for (std::size_t k = 0; k < pos; ++k) line += text[k] == '\n';
    CHECK(e.line() == line);
    CHECK(std::string(e.what()).find("x.json:") == 0);
  }
  CHECK(outcome_of([] { parse_scenario("{ not json", "y.json"); }).code ==
        ErrorCode::kParseError);
  CHECK(outcome_of([] { load_scenario("/nonexistent/file.json"); }).code ==
        ErrorCode::kIoFailure);
}

TEST_CASE("monitor list validation") {
  json j = json::parse(tiny(30.0));
  j["monitors"] = {"conservation", "no_such_monitor"};
  CHECK(outcome_of([&] { parse_scenario(j.dump(), "m.json"); }).code ==
        ErrorCode::kConfigError);
  j["monitors"] = {"conservation", "conservation"};
  CHECK(outcome_of([&] { parse_scenario(j.dump(), "m.json"); }).code ==
        ErrorCode::kConfigError);
  j["monitors"] = {"invariant_set"};
  CHECK(outcome_of([&] { parse_scenario(j.dump(), "m.json"); }).code ==
        ErrorCode::kConfigError);
  j["monitors"] = {{{"name", "generator_envelope"}, {"slack", 0.1}}};
  Scenario sc = parse_scenario(j.dump(), "m.json");
  REQUIRE(sc.monitors.size() == 1);
  CHECK(sc.monitors[0].slack == doctest::Approx(0.1));
}

TEST_CASE("overrides") {
  ScenarioOverrides ov;
  ov.seed = 99;
  ov.guard_frac = 0.95;
  Scenario sc = load_scenario(scenario_path("example1.json"), ov);
  CHECK(sc.seed == 99);
  CHECK(sc.sys.disturbance.seed == 99);
  CHECK(sc.sys.clock.guard_frac() == doctest::Approx(0.95));
  ov.guard_frac = 1.5;
  CHECK(outcome_of([&] {
          load_scenario(scenario_path("example1.json"), ov);
        }).threw);
}

TEST_CASE("cost section parses without the gain gate") {
  Vector z0;
  double tol = 0.0;
  CostSet c = parse_cost_section(tiny(1.0), "t.json", &z0, &tol);
  CHECK(c.size() == 3);
  CHECK(c.dim() == 1);
  CHECK(tol > 0.0);
  CHECK(z0.size() == 1);
  json j = scenario_json("example2.json");
  CostSet e2 = parse_cost_section(j.dump(), "e2.json");
  auto opt = optimum_oracle(e2, 1e-10, Vector{0.0, 0.0});
  CHECK(std::abs(opt.z[0] - 0.7263) < 1e-3);
  CHECK(std::abs(opt.z[1] - 0.7183) < 1e-3);
}
