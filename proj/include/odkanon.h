/* Copyright 2026 The ODkAnon Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libodkanon: k-anonymous origin-destination matrices over
 * hierarchical hexagonal grids.
 *
 * Conventions:
 *  - every fallible function returns an odk_status; ODK_OK is 0;
 *  - odk_last_error() returns a thread-local message for the most recent
 *    failure on the calling thread;
 *  - objects are opaque handles created by odk_*_new/load/run functions and
 *    released with the matching odk_*_free (null-safe);
 *  - handles own shared references: freeing a hierarchy or dataset is safe
 *    while results derived from it are still alive;
 *  - strings returned through char** out-parameters are heap-allocated and
 *    released with odk_string_free;
 *  - structured parameters travel as JSON (documented in the README).
 */

#ifndef ODKANON_H_
#define ODKANON_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum odk_status {
  ODK_OK = 0,
  ODK_E_INVALID_ARGUMENT = 1,
  ODK_E_IO = 2,
  ODK_E_PARSE = 3,
  ODK_E_UNKNOWN_CELL = 4,
  ODK_E_ABOVE_ROOT = 5,
  ODK_E_LEAF_CELL = 6,
  ODK_E_MISSING_CENTROID = 7,
  ODK_E_NON_POSITIVE_WEIGHT = 8,
  ODK_E_MISSING_ATTRIBUTE = 9,
  ODK_E_EMPTY_DATASET = 10,
  ODK_E_EMPTY_MATRIX = 11,
  ODK_E_DISJOINT_ROOTS = 12,
  ODK_E_INCONSISTENT_INPUTS = 13,
  ODK_E_INSUFFICIENT_VOLUME = 14,
  ODK_E_NO_VALID_CLASSES = 15,
  ODK_E_NOT_APPLICABLE = 16,
  ODK_E_INVALID_CONFIG = 17,
  ODK_E_TIMEOUT = 18,
  ODK_E_INTERNAL = 19
} odk_status;

typedef struct odk_hierarchy odk_hierarchy;
typedef struct odk_dataset odk_dataset;
typedef struct odk_result odk_result;

const char* odk_version(void);
const char* odk_last_error(void);
void odk_string_free(char* s);

/* --- hierarchies ------------------------------------------------------- */

/* Self-contained aperture-7 hierarchy of the given depth. */
odk_status odk_hierarchy_synthetic(int max_resolution, odk_hierarchy** out);

/* Parent-map CSV (`child,parent`), optional centroid CSV (`cell,x,y`). */
odk_status odk_hierarchy_load(const char* parent_csv,
                              const char* centroid_csv_or_null,
                              odk_hierarchy** out);

/* `synthetic:<resolution>` or `parents:<file>`. */
odk_status odk_hierarchy_from_spec(const char* spec,
                                   const char* centroid_csv_or_null,
                                   odk_hierarchy** out);
void odk_hierarchy_free(odk_hierarchy* h);

/* --- datasets ---------------------------------------------------------- */

odk_status odk_dataset_load(const odk_hierarchy* h, const char* trips_csv,
                            odk_dataset** out);

/* Seeded synthetic mobility data; config JSON fields are documented in the
 * README (n_trips, target_resolution, n_hotspots, ...). */
odk_status odk_dataset_synthesize(const char* config_json, odk_dataset** out);

odk_status odk_dataset_write(const odk_dataset* ds, const char* trips_csv);
long long odk_dataset_trip_count(const odk_dataset* ds);

/* JSON array of the categories present for `attribute`. */
odk_status odk_dataset_categories(const odk_dataset* ds, const char* attribute,
                                  char** json_out);

/* Records whose `attribute` equals `category`. */
odk_status odk_dataset_filter(const odk_dataset* ds, const char* attribute,
                              const char* category, odk_dataset** out);

/* Threshold enforced for a protection target; population mode scales
 * base_k by the mean participant weight. */
odk_status odk_effective_k(const odk_dataset* ds, double base_k,
                           const char* mode, double* out);
void odk_dataset_free(odk_dataset* ds);

/* --- anonymization runs ------------------------------------------------ */

/* Options JSON: {"algorithm": "odkanon"|"oigh"|"mondrian", "base_k": 10,
 *   "protect_mode": "participant"|"population", "suppression_budget": 0.1,
 *   "max_gen_levels": 5, "time_limit_s": 7200, "seed": 1729}
 * Missing fields take those defaults. */
odk_status odk_anonymize(const odk_dataset* ds, const char* options_json,
                         odk_result** out);

/* 0 = reached k everywhere, 1 = exhausted (sub-k cells remain). */
odk_status odk_result_termination(const odk_result* r, int* out);

/* Run facts as JSON: algorithm, effective k, zones, steps, timings, ... */
odk_status odk_result_summary(const odk_result* r, char** json_out);

/* Writes matrix.csv + zone maps (or regions.csv) + manifest.json into
 * `out_dir`; `command_line` and `input_desc_json` are recorded in the
 * manifest so the run can be reproduced. */
odk_status odk_result_write(const odk_result* r, const char* out_dir,
                            const char* command_line,
                            const char* input_desc_json);

/* Utility metrics evaluated in `eval_mode`, as JSON. */
odk_status odk_result_metrics(const odk_result* r, const char* eval_mode,
                              char** json_out);

/* Re-aggregates the unsuppressed trips through the released zones with
 * `eval_mode` volumes and checks them against `required_k` (pass 0 to use
 * that mode's effective k). */
odk_status odk_result_audit(const odk_result* r, const char* eval_mode,
                            double required_k, double* min_volume,
                            long long* cells_below);
void odk_result_free(odk_result* r);

/* Re-runs the job recorded in `run_dir`'s manifest against `ds`; manifests
 * carry everything needed for a byte-identical re-run. */
odk_status odk_result_rerun(const odk_dataset* ds, const char* run_dir,
                            odk_result** out);

/* --- benchmark harness -------------------------------------------------- */

/* Executes a bench plan (JSON file, documented in the README): every
 * (algorithm x segment x protect mode) cell under the plan's wall-clock
 * budget, cells over budget recorded as N/A. Writes report.csv/report.json
 * under the output directory (plan's, unless overridden). */
odk_status odk_bench_run(const char* plan_path,
                         const char* output_dir_or_null, char** report_json);

#ifdef __cplusplus
}
#endif

#endif /* ODKANON_H_ */
