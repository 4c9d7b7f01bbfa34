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
#ifndef DPTCO_DPTCO_H_
#define DPTCO_DPTCO_H_

/* C interface of the DPTCO library: load a scenario, run it, write the run
 * artifacts and query results. Every call returns a status code; the
 * message of the last failure on the calling thread is available through
 * dptco_last_error(). Strings returned through `char**` are owned by the
 * caller and released with dptco_string_free(). */

#include <stdint.h>

#if defined(_WIN32)
#if defined(DPTCO_BUILDING_LIBRARY)
#define DPTCO_API __declspec(dllexport)
#else
#define DPTCO_API __declspec(dllimport)
#endif
#else
#define DPTCO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dptco_status {
  DPTCO_OK = 0,
  DPTCO_E_INVALID_ARGUMENT,
  DPTCO_E_TIME_OUT_OF_WINDOW,
  DPTCO_E_QUADRATURE_FAILURE,
  DPTCO_E_SELF_LOOP,
  DPTCO_E_NEGATIVE_WEIGHT,
  DPTCO_E_DISCONNECTED,
  DPTCO_E_DEGENERATE_SIZE,
  DPTCO_E_DIMENSION_MISMATCH,
  DPTCO_E_NO_CONVERGENCE,
  DPTCO_E_NON_POSITIVE_INPUT,
  DPTCO_E_NOT_HURWITZ,
  DPTCO_E_SINGULAR_SYSTEM,
  DPTCO_E_GUARD_EXCEEDED,
  DPTCO_E_EMPTY_TRAJECTORY,
  DPTCO_E_MARGIN_TOO_SMALL,
  DPTCO_E_NON_FINITE_STATE,
  DPTCO_E_STEP_UNDERFLOW,
  DPTCO_E_IO_FAILURE,
  DPTCO_E_PARSE_ERROR,
  DPTCO_E_CONFIG_ERROR,
  DPTCO_E_SCHEMA_MISMATCH,
  DPTCO_E_CRITERION_VIOLATION,
  DPTCO_E_INTERNAL
} dptco_status;

/** Opaque resolved scenario. */
typedef struct dptco_scenario dptco_scenario;
/** Opaque completed run. */
typedef struct dptco_result dptco_result;

/** Endpoint summary of a completed run; -1 marks quantities that do not
 *  apply to the scenario's plant. */
typedef struct dptco_endpoint {
  double t_final;
  double generator_max_err;
  double tracking_max_err;
  double theta_hat_max;
  double x2_max;
  double x3_max;
  double conservation_drift;
} dptco_endpoint;

DPTCO_API const char* dptco_version(void);
DPTCO_API const char* dptco_status_name(dptco_status status);
/** Message of the last failed call on this thread, "" if none. */
DPTCO_API const char* dptco_last_error(void);
/** 1-based scenario line of the last configuration error, 0 if unknown. */
DPTCO_API uint64_t dptco_last_error_line(void);
DPTCO_API void dptco_string_free(char* s);

DPTCO_API dptco_status dptco_scenario_load(const char* path,
                                           dptco_scenario** out);
DPTCO_API dptco_status dptco_scenario_parse(const char* json_text,
                                            dptco_scenario** out);
DPTCO_API void dptco_scenario_free(dptco_scenario* sc);
/** Re-resolves the scenario with a new seed (disturbance, random p0). */
DPTCO_API dptco_status dptco_scenario_set_seed(dptco_scenario* sc,
                                               uint64_t seed);
/** Re-resolves the scenario with a new guard fraction in (0, 1). */
DPTCO_API dptco_status dptco_scenario_set_guard_frac(dptco_scenario* sc,
                                                     double guard_frac);
/** Number of state / derived CSV columns, excluding t and mu. */
DPTCO_API dptco_status dptco_scenario_dims(const dptco_scenario* sc,
                                           uint64_t* state_dim,
                                           uint64_t* derived_dim);

DPTCO_API dptco_status dptco_run(const dptco_scenario* sc,
                                 dptco_result** out);
DPTCO_API void dptco_result_free(dptco_result* res);
/** Writes manifest.json, trajectory.csv, er_envelope.svg, tracking.svg. */
DPTCO_API dptco_status dptco_result_write(dptco_result* res,
                                          const char* out_dir);
DPTCO_API dptco_status dptco_result_manifest_json(const dptco_result* res,
                                                  char** out);
/** 1 if every requested monitor passed, 0 otherwise (or on NULL). */
DPTCO_API int dptco_result_all_monitors_pass(const dptco_result* res);
DPTCO_API dptco_status dptco_result_endpoint(const dptco_result* res,
                                             dptco_endpoint* out);
/** Copies up to `cap` entries of z*; `len` receives the dimension. */
DPTCO_API dptco_status dptco_result_optimum(const dptco_result* res,
                                            double* z, uint64_t cap,
                                            uint64_t* len);

/** Optimum certificate of a scenario's cost section as JSON. */
DPTCO_API dptco_status dptco_optimum(const char* scenario_path, char** json);
/** Monitors recomputed from an exported CSV, as JSON. */
DPTCO_API dptco_status dptco_verify(const char* csv_path,
                                    const dptco_scenario* sc, char** json,
                                    int* all_pass);

#ifdef __cplusplus
}
#endif

#endif /* DPTCO_DPTCO_H_ */
