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

// Scenario files: JSON with sections clock, network, costs, gains,
// generator, agents, disturbance, solver and monitors. Loading resolves all
// derived constants and runs the gain criterion gate.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dptco/costs.hpp"
#include "dptco/generator.hpp"
#include "dptco/sim_engine.hpp"
#include "dptco/timegain.hpp"

namespace dptco {

/// Command-line style overrides applied while resolving a scenario.
struct ScenarioOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> guard_frac;
};

/// One growth-criterion evaluation together with its gate outcome.
struct CriterionEntry {
  std::string name;  // "generator", "chain_dc1", "strict_dc_xi", "chain_dc2"
  CriterionReport report;
  /// Failed but accepted through acknowledge_criteria_override.
  bool acknowledged = false;
  std::string detail;
};

/// Monitor requested by the scenario; negative values mean "default".
struct MonitorRequest {
  std::string name;
  double slack = -1.0;
  double tol = -1.0;
  double h = -1.0;
};

/// Names accepted in the monitors section.
const std::vector<std::string>& known_monitor_names();

struct Scenario {
  std::string name;
  std::string source;  // file path or "<memory>"
  std::string hash;    // FNV-1a 64 of the file bytes, hex
  std::uint64_t seed = 1;

  CoupledSystem sys;
  SolverSettings solver;

  CostConstants cost_constants;
  GeneratorConstants gen_constants;
  double lambda2 = 0.0;
  double lambda_n = 0.0;
  /// Generator gain as written and as used (differs when raised).
  GainFunction alpha_requested = GainFunction::linear(1.0);
  bool alpha_raised = false;

  std::vector<CriterionEntry> criteria;
  bool acknowledge_override = false;
  std::vector<std::string> overrides_used;
  std::vector<std::string> warnings;

  std::vector<MonitorRequest> monitors;
  double optimum_tol = 1e-10;
  Vector z_init;
  std::size_t constant_samples = 400;
};

/// Parses and resolves a scenario. Errors are ConfigError carrying the
/// 1-based line of the offending key; a failed criterion without
/// acknowledge_criteria_override raises kCriterionViolation.
Scenario parse_scenario(const std::string& text, const std::string& source,
                        const ScenarioOverrides& overrides = {});

/// Reads the file and calls parse_scenario; throws kIoFailure.
Scenario load_scenario(const std::string& path,
                       const ScenarioOverrides& overrides = {});

/// FNV-1a 64-bit hash as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Builds the optimisation problem only (costs section) for the optimum
/// command, skipping the gain gate. Unset options default to zeros and
/// the Scenario default tolerance.
CostSet parse_cost_section(const std::string& text, const std::string& source,
                           Vector* z_init = nullptr, double* tol = nullptr);

}  // namespace dptco
