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

// End-to-end scenario runs: optimum oracle, integration, monitors, the run
// manifest and the output files (manifest.json, trajectory.csv,
// er_envelope.svg, tracking.svg).

#include <optional>
#include <string>
#include <vector>

#include "dptco/costs.hpp"
#include "dptco/monitors.hpp"
#include "dptco/scenario.hpp"
#include "dptco/sim_engine.hpp"
#include "dptco/strictfb_ctrl.hpp"

namespace dptco {

struct RunResult {
  Scenario scenario;
  OptimumCertificate optimum;
  IntegrationResult integration;
  std::vector<MonitorReport> monitors;
  EndpointMetrics metrics;
  std::optional<RecipeCheck> recipe;
  double recipe_h = 0.0;
  double duration_s = 0.0;
  std::vector<std::string> outputs;

  bool all_monitors_pass() const;
};

/// Optimum at the scenario's tolerance, then integration and monitors.
RunResult run_scenario(const Scenario& sc);

/// Writes the four output files into `out_dir` (created if missing) and
/// records their names in `result.outputs`. Throws kIoFailure.
void write_run_outputs(RunResult& result, const std::string& out_dir);

std::string manifest_json(const RunResult& result);
std::string optimum_json(const OptimumCertificate& cert);
std::string monitors_json(const std::vector<MonitorReport>& reports);

struct VerifyResult {
  std::vector<MonitorReport> monitors;
  bool all_pass() const;
};

/// Recomputes the scenario's monitors from an exported trajectory.
/// Throws kSchemaMismatch when the CSV does not match the scenario.
VerifyResult verify_csv(const std::string& csv_path, const Scenario& sc);

}  // namespace dptco
