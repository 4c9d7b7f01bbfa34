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
// Command-line front end over the C API.
//
//   dptco run <scenario> --out <dir> [--seed N] [--guard-frac F]
//   dptco optimum <scenario>
//   dptco verify <csv> <scenario>
//   dptco sweep <dir> [--out <dir>]
//
// Exit codes: 0 success, 2 a monitor failed, 1 any error.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "dptco/dptco.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitMonitorFail = 2;

int report_error(const char* what, dptco_status status) {
  std::fprintf(stderr, "dptco: %s [%s]: %s\n", what, dptco_status_name(status),
               dptco_last_error());
  return kExitError;
}

/// Scenario handle released on scope exit.
struct ScenarioHandle {
  dptco_scenario* p = nullptr;
  ~ScenarioHandle() { dptco_scenario_free(p); }
};

struct ResultHandle {
  dptco_result* p = nullptr;
  ~ResultHandle() { dptco_result_free(p); }
};

int run_one(const std::string& scenario, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::optional<double> guard,
            std::string* summary) {
  ScenarioHandle sc;
  dptco_status st = dptco_scenario_load(scenario.c_str(), &sc.p);
  if (st != DPTCO_OK) return report_error("cannot load scenario", st);
  if (seed && (st = dptco_scenario_set_seed(sc.p, *seed)) != DPTCO_OK)
    return report_error("cannot apply --seed", st);
  if (guard && (st = dptco_scenario_set_guard_frac(sc.p, *guard)) != DPTCO_OK)
    return report_error("cannot apply --guard-frac", st);
  ResultHandle res;
  if ((st = dptco_run(sc.p, &res.p)) != DPTCO_OK)
    return report_error("run failed", st);
  if ((st = dptco_result_write(res.p, out_dir.c_str())) != DPTCO_OK)
    return report_error("cannot write outputs", st);
  dptco_endpoint ep{};
  dptco_result_endpoint(res.p, &ep);
  const bool pass = dptco_result_all_monitors_pass(res.p) == 1;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "%s: monitors %s; generator err %.3e; tracking err %.3e; "
                "outputs in %s",
                scenario.c_str(), pass ? "PASS" : "FAIL", ep.generator_max_err,
                ep.tracking_max_err, out_dir.c_str());
  *summary = buf;
  return pass ? kExitOk : kExitMonitorFail;
}

int cmd_optimum(const std::string& scenario) {
  char* json = nullptr;
  const dptco_status st = dptco_optimum(scenario.c_str(), &json);
  if (st != DPTCO_OK) return report_error("optimum failed", st);
  std::fputs(json, stdout);
  dptco_string_free(json);
  return kExitOk;
}

int cmd_verify(const std::string& csv, const std::string& scenario) {
  ScenarioHandle sc;
  dptco_status st = dptco_scenario_load(scenario.c_str(), &sc.p);
  if (st != DPTCO_OK) return report_error("cannot load scenario", st);
  char* json = nullptr;
  int pass = 0;
  if ((st = dptco_verify(csv.c_str(), sc.p, &json, &pass)) != DPTCO_OK)
    return report_error("verify failed", st);
  std::fputs(json, stdout);
  dptco_string_free(json);
  return pass ? kExitOk : kExitMonitorFail;
}

unsigned sweep_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DPTCO_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return n;
}

int cmd_sweep(const std::string& dir, const std::string& out_root) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json")
      files.push_back(e.path());
  if (ec) {
    std::fprintf(stderr, "dptco: cannot list %s\n", dir.c_str());
    return kExitError;
  }
  std::sort(files.begin(), files.end());
  std::vector<int> codes(files.size(), kExitOk);
  std::vector<std::string> lines(files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < files.size();) {
      const fs::path out = fs::path(out_root) / files[k].stem();
      std::string summary;
      codes[k] = run_one(files[k].string(), out.string(), {}, {}, &summary);
      lines[k] = codes[k] == kExitError
                     ? files[k].string() + ": ERROR (see stderr)"
                     : summary;
    }
  };
  const unsigned n = std::min<unsigned>(sweep_threads(),
                                        std::max<std::size_t>(1, files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  int worst = kExitOk;
  for (std::size_t k = 0; k < files.size(); ++k) {
    std::printf("%s\n", lines[k].c_str());
    if (codes[k] == kExitError || worst == kExitError)
      worst = kExitError;
    else
      worst = std::max(worst, codes[k]);
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed prescribed-time optimisation and tracking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(dptco_version()));

  std::string scenario, out_dir, csv, sweep_dir, sweep_out;
  std::optional<std::uint64_t> seed;
  std::optional<double> guard;

  auto* run = app.add_subcommand("run", "Integrate a scenario and write artifacts");
  run->add_option("scenario", scenario, "Scenario JSON")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Seed for disturbances and random states");
  run->add_option("--guard-frac", guard, "Fraction of T to integrate, in (0,1)");

  auto* opt = app.add_subcommand("optimum", "Print the optimum certificate");
  opt->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* ver = app.add_subcommand("verify", "Recompute monitors from a CSV");
  ver->add_option("csv", csv, "trajectory.csv from a run")->required();
  ver->add_option("scenario", scenario, "Scenario JSON")->required();

  auto* sw = app.add_subcommand("sweep", "Run every scenario in a directory");
  sw->add_option("dir", sweep_dir, "Directory of scenario JSON files")->required();
  sw->add_option("--out", sweep_out, "Output root (default <dir>/sweep_out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  if (*run) {
    std::string summary;
    const int code = run_one(scenario, out_dir, seed, guard, &summary);
    if (code != kExitError) std::printf("%s\n", summary.c_str());
    return code;
  }
  if (*opt) return cmd_optimum(scenario);
  if (*ver) return cmd_verify(csv, scenario);
  if (*sw) {
    if (sweep_out.empty())
      sweep_out = (std::filesystem::path(sweep_dir) / "sweep_out").string();
    return cmd_sweep(sweep_dir, sweep_out);
  }
  return kExitError;
}
