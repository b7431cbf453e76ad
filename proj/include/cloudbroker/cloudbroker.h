/*
 * Copyright 2026 The Cloud Broker Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * C interface of the cloud broker. Documents cross the boundary as UTF-8
 * JSON text (the manifest as DSL text). Strings returned through `char**`
 * are owned by the caller and released with cb_string_free().
 *
 * Every function returns a cb_status; on failure cb_last_error() describes
 * the error for the calling thread until its next call into the library.
 */

#ifndef CLOUDBROKER_H_
#define CLOUDBROKER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CLOUDBROKER_BUILDING)
#    define CB_API __declspec(dllexport)
#  else
#    define CB_API __declspec(dllimport)
#  endif
#else
#  define CB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cb_status {
  CB_OK = 0,
  CB_ERR_INVALID_ARGUMENT = 1, /* null handle or pointer, bad component name */
  CB_ERR_IO = 2,
  CB_ERR_VALIDATION = 3,       /* malformed document or rejected update */
  CB_ERR_INFEASIBLE = 4,       /* NoFeasibleProduct, InitialPlanInfeasible */
  CB_ERR_SCENARIO = 5,
  CB_ERR_DUPLICATE = 6,        /* DuplicateProduct */
  CB_ERR_NOT_FOUND = 7,        /* UnknownProduct, unknown component */
  CB_ERR_SYNTAX = 8,           /* manifest DSL errors */
  CB_ERR_INTERNAL = 9
} cb_status;

typedef struct cb_catalog cb_catalog;
typedef struct cb_simulation cb_simulation;

CB_API const char* cb_version(void);
CB_API const char* cb_status_name(cb_status status);
/* Message of the last failure on this thread, "" when the last call succeeded. */
CB_API const char* cb_last_error(void);
CB_API void cb_string_free(char* s);

/* ---- catalog ---------------------------------------------------------- */

CB_API cb_status cb_catalog_create(const char* reference_currency, cb_catalog** out);
CB_API cb_status cb_catalog_from_json(const char* json, cb_catalog** out);
CB_API cb_status cb_catalog_to_json(const cb_catalog* catalog, char** out);
CB_API void cb_catalog_destroy(cb_catalog* catalog);

CB_API cb_status cb_catalog_reference_currency(const cb_catalog* catalog, char** out);
CB_API cb_status cb_catalog_size(const cb_catalog* catalog, size_t* out);
/* `revision` may be NULL. */
CB_API cb_status cb_catalog_add_product(cb_catalog* catalog, const char* product_json,
                                        uint64_t* revision);
/* `events_out` (may be NULL) receives the emitted events as a JSON array. */
CB_API cb_status cb_catalog_update_product(cb_catalog* catalog, const char* product_id,
                                           const char* patch_json, char** events_out);
/* One product per line, in catalog order. */
CB_API cb_status cb_catalog_list(const cb_catalog* catalog, char** jsonl_out);
CB_API cb_status cb_catalog_ingest_qos(cb_catalog* catalog, const char* report_json);

/* ---- manifest, planning ----------------------------------------------- */

/* Parses and validates a manifest; `canonical_out` (may be NULL) receives
 * its serialized form. */
CB_API cb_status cb_manifest_check(const char* manifest_text, char** canonical_out);

/* Dry-run decision: the plan decide() produces, as JSON. `policy_json` may
 * be NULL for the default policy. */
CB_API cb_status cb_plan(const cb_catalog* catalog, const char* manifest_text,
                         const char* app_json, const char* workload_json,
                         const char* policy_json, char** plan_out);

/* Ranked candidate table for one component of `plan_json`. `component` is
 * "kind/name" or a bare name that is unique within the application. */
CB_API cb_status cb_explain(const cb_catalog* catalog, const char* manifest_text,
                            const char* app_json, const char* workload_json,
                            const char* policy_json, const char* plan_json,
                            const char* component, char** explanation_out);

/* ---- simulation ------------------------------------------------------- */

typedef struct cb_sim_options {
  int has_seed;
  uint64_t seed;
  int has_ticks;
  int64_t ticks;
  /* Used only for inputs the scenario file does not name; may be NULL. */
  const char* catalog_path;
  const char* policy_path;
} cb_sim_options;

/* `options` may be NULL. */
CB_API cb_status cb_simulate(const char* scenario_path, const cb_sim_options* options,
                             cb_simulation** out);
/* Event log, one JSON record per line. */
CB_API cb_status cb_simulation_log(const cb_simulation* sim, char** jsonl_out);
/* {finalRevision, monthlyCost, redeployments, injectedFailures, ...} */
CB_API cb_status cb_simulation_summary(const cb_simulation* sim, char** json_out);
CB_API void cb_simulation_destroy(cb_simulation* sim);

#ifdef __cplusplus
}
#endif

#endif /* CLOUDBROKER_H_ */
