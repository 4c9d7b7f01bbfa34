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
#include "dptco/dptco.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "dptco/errors.hpp"
#include "dptco/report.hpp"
#include "dptco/scenario.hpp"

struct dptco_scenario {
  std::string text;
  std::string source;
  dptco::ScenarioOverrides overrides;
  dptco::Scenario resolved;
};

struct dptco_result {
  dptco::RunResult run;
};

namespace {

thread_local std::string g_last_error;
thread_local std::uint64_t g_last_line = 0;

dptco_status to_status(dptco::ErrorCode code) {
  return static_cast<dptco_status>(static_cast<int>(code) + 1);
}

dptco_status fail(dptco_status st, const std::string& msg,
                  std::uint64_t line = 0) {
  g_last_error = msg;
  g_last_line = line;
  return st;
}

/// Runs `f`, translating exceptions into status codes.
template <class F>
dptco_status guarded(F&& f) {
  g_last_error.clear();
  g_last_line = 0;
  try {
    f();
    return DPTCO_OK;
  } catch (const dptco::ConfigError& e) {
    return fail(to_status(e.code()), e.what(), e.line());
  } catch (const dptco::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(DPTCO_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DPTCO_E_INTERNAL, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void resolve(dptco_scenario& sc) {
  sc.resolved = dptco::parse_scenario(sc.text, sc.source, sc.overrides);
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw dptco::Error(dptco::ErrorCode::kIoFailure,
                       std::string("cannot open ") + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

extern "C" {

const char* dptco_version(void) { return "1.0.0"; }

const char* dptco_status_name(dptco_status status) {
  if (status == DPTCO_OK) return "ok";
  if (status == DPTCO_E_INTERNAL) return "internal";
  if (status < DPTCO_OK || status > DPTCO_E_INTERNAL) return "unknown";
  return dptco::error_code_name(
      static_cast<dptco::ErrorCode>(static_cast<int>(status) - 1));
}

const char* dptco_last_error(void) { return g_last_error.c_str(); }

uint64_t dptco_last_error_line(void) { return g_last_line; }

void dptco_string_free(char* s) { std::free(s); }

dptco_status dptco_scenario_load(const char* path, dptco_scenario** out) {
  if (!path || !out) return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto sc = std::make_unique<dptco_scenario>();
    sc->text = read_file(path);
    sc->source = path;
    resolve(*sc);
    *out = sc.release();
  });
}

dptco_status dptco_scenario_parse(const char* json_text, dptco_scenario** out) {
  if (!json_text || !out) return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto sc = std::make_unique<dptco_scenario>();
    sc->text = json_text;
    sc->source = "<memory>";
    resolve(*sc);
    *out = sc.release();
  });
}

void dptco_scenario_free(dptco_scenario* sc) { delete sc; }

dptco_status dptco_scenario_set_seed(dptco_scenario* sc, uint64_t seed) {
  if (!sc) return fail(DPTCO_E_INVALID_ARGUMENT, "null scenario");
  return guarded([&] {
    auto ov = sc->overrides;
    ov.seed = seed;
    sc->resolved = dptco::parse_scenario(sc->text, sc->source, ov);
    sc->overrides = ov;
  });
}

dptco_status dptco_scenario_set_guard_frac(dptco_scenario* sc,
                                           double guard_frac) {
  if (!sc) return fail(DPTCO_E_INVALID_ARGUMENT, "null scenario");
  if (!(guard_frac > 0.0 && guard_frac < 1.0))
    return fail(DPTCO_E_CONFIG_ERROR, "guard fraction must lie in (0, 1)");
  return guarded([&] {
    auto ov = sc->overrides;
    ov.guard_frac = guard_frac;
    sc->resolved = dptco::parse_scenario(sc->text, sc->source, ov);
    sc->overrides = ov;
  });
}

dptco_status dptco_scenario_dims(const dptco_scenario* sc, uint64_t* state_dim,
                                 uint64_t* derived_dim) {
  if (!sc) return fail(DPTCO_E_INVALID_ARGUMENT, "null scenario");
  return guarded([&] {
    if (state_dim) *state_dim = sc->resolved.sys.state_dim();
    if (derived_dim)
      *derived_dim = dptco::derived_column_names(sc->resolved.sys).size();
  });
}

dptco_status dptco_run(const dptco_scenario* sc, dptco_result** out) {
  if (!sc || !out) return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto res = std::make_unique<dptco_result>();
    res->run = dptco::run_scenario(sc->resolved);
    *out = res.release();
  });
}

void dptco_result_free(dptco_result* res) { delete res; }

dptco_status dptco_result_write(dptco_result* res, const char* out_dir) {
  if (!res || !out_dir) return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { dptco::write_run_outputs(res->run, out_dir); });
}

dptco_status dptco_result_manifest_json(const dptco_result* res, char** out) {
  if (!res || !out) return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] { *out = dup_string(dptco::manifest_json(res->run)); });
}

int dptco_result_all_monitors_pass(const dptco_result* res) {
  return res && res->run.all_monitors_pass() ? 1 : 0;
}

dptco_status dptco_result_endpoint(const dptco_result* res,
                                   dptco_endpoint* out) {
  if (!res || !out) return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  const dptco::EndpointMetrics& m = res->run.metrics;
  *out = dptco_endpoint{m.t_final,       m.generator_max_err, m.tracking_max_err,
                        m.theta_hat_max, m.x2_max,            m.x3_max,
                        m.conservation_drift};
  return DPTCO_OK;
}

dptco_status dptco_result_optimum(const dptco_result* res, double* z,
                                  uint64_t cap, uint64_t* len) {
  if (!res) return fail(DPTCO_E_INVALID_ARGUMENT, "null result");
  const dptco::Vector& v = res->run.optimum.z;
  if (len) *len = v.size();
  for (std::size_t k = 0; z && k < v.size() && k < cap; ++k) z[k] = v[k];
  return DPTCO_OK;
}

dptco_status dptco_optimum(const char* scenario_path, char** json) {
  if (!scenario_path || !json)
    return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    dptco::Vector z0;
    double tol = 1e-10;
    const dptco::CostSet costs = dptco::parse_cost_section(
        read_file(scenario_path), scenario_path, &z0, &tol);
    *json = dup_string(dptco::optimum_json(dptco::optimum_oracle(costs, tol, z0)));
  });
}

dptco_status dptco_verify(const char* csv_path, const dptco_scenario* sc,
                          char** json, int* all_pass) {
  if (!csv_path || !sc || !json)
    return fail(DPTCO_E_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    const dptco::VerifyResult vr = dptco::verify_csv(csv_path, sc->resolved);
    *json = dup_string(dptco::monitors_json(vr.monitors));
    if (all_pass) *all_pass = vr.all_pass() ? 1 : 0;
  });
}

}  // extern "C"
