// Copyright 2026 The cplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CPLAN_CPLAN_H_
#define CPLAN_CPLAN_H_

/* C interface to the cascaded planning library. All functions return a
 * cplan_status; on failure cplan_last_error() describes the problem (the
 * message is thread-local and valid until the next failing call on the same
 * thread). Strings handed out by the library are released with
 * cplan_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(CPLAN_BUILDING_LIBRARY)
#define CPLAN_API __attribute__((visibility("default")))
#else
#define CPLAN_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cplan_status {
  CPLAN_OK = 0,
  CPLAN_E_INVALID_ARGUMENT = 1,
  CPLAN_E_DEGENERATE_GEOMETRY = 2,
  CPLAN_E_INVALID_ARC_LENGTH = 3,
  CPLAN_E_INSUFFICIENT_HORIZON = 4,
  CPLAN_E_REVERSE_MOTION = 5,
  CPLAN_E_PARSE = 6,
  CPLAN_E_VERSION = 7,
  CPLAN_E_IO = 8,
  CPLAN_E_AUGMENT_INFEASIBLE = 9,
  CPLAN_E_RELABEL_DEGENERATE = 10,
  CPLAN_E_CLUSTER = 11,
  CPLAN_E_NO_CANDIDATES = 12,
  CPLAN_E_SHAPE = 13,
  CPLAN_E_TRAINING_DIVERGED = 14,
  CPLAN_E_PATH_EXHAUSTED = 15,
  CPLAN_E_CONFIG = 16,
  CPLAN_E_INTERNAL = 100
} cplan_status;

CPLAN_API const char* cplan_status_name(cplan_status status);
CPLAN_API const char* cplan_last_error(void);
CPLAN_API const char* cplan_version(void);
CPLAN_API void cplan_string_free(char* s);

/* Worker cap for suite and batch fan-out: PLAN_CLI_THREADS when set to a
 * positive integer, otherwise the hardware concurrency (at least 1). */
CPLAN_API int cplan_thread_limit(void);

/* ---- Config ------------------------------------------------------------- */

typedef struct cplan_config cplan_config;

CPLAN_API cplan_status cplan_config_default(cplan_config** out);
CPLAN_API cplan_status cplan_config_load(const char* path, cplan_config** out);
/* Relative io paths inside `json_text` resolve against `base_dir` (may be NULL). */
CPLAN_API cplan_status cplan_config_parse(const char* json_text, const char* base_dir,
                                          cplan_config** out);
CPLAN_API void cplan_config_free(cplan_config* cfg);
CPLAN_API cplan_status cplan_config_set_seed(cplan_config* cfg, uint64_t seed);
CPLAN_API cplan_status cplan_config_seed(const cplan_config* cfg, uint64_t* out);
/* Full config tree, every key present. */
CPLAN_API cplan_status cplan_config_to_json(const cplan_config* cfg, char** out);

/* ---- Frame logs ----------------------------------------------------------- */

typedef struct cplan_frames cplan_frames;

CPLAN_API cplan_status cplan_frames_load(const char* path, cplan_frames** out);
CPLAN_API void cplan_frames_free(cplan_frames* frames);
CPLAN_API cplan_status cplan_frames_count(const cplan_frames* frames, size_t* out);
CPLAN_API cplan_status cplan_frames_save(const cplan_frames* frames, const char* path);

/* ---- Commands ------------------------------------------------------------
 * Each command reads its inputs from the config's io block (unless given
 * explicitly), writes its artifacts below `out_dir` (created if missing) and
 * fills a summary. Outputs depend only on the config and its seed. */

typedef struct cplan_anchors_summary {
  size_t frames;
  size_t labeled;
  size_t skipped;
  int clusters;
  double inertia; /* final k-means inertia */
} cplan_anchors_summary;

/* frames_path NULL uses io.frames; k <= 0 uses anchors.path_count.
 * Writes anchors.json. */
CPLAN_API cplan_status cplan_cmd_anchors(const cplan_config* cfg, const char* frames_path,
                                         int k, const char* out_dir,
                                         cplan_anchors_summary* summary);

typedef struct cplan_augment_summary {
  size_t frames;
  size_t eligible;
  size_t inserted;
  size_t threatening;
  double inserted_fraction; /* inserted / eligible (0 when nothing is eligible) */
  double mean_threat_beta;  /* 1 when nothing threatening was inserted */
} cplan_augment_summary;

/* Writes frames.ndjson (untouched frames copied byte for byte) and
 * augment_reports.ndjson. */
CPLAN_API cplan_status cplan_cmd_augment(const cplan_config* cfg, const char* frames_path,
                                         const char* out_dir, cplan_augment_summary* summary);

typedef struct cplan_train_summary {
  size_t frames;
  size_t samples;
  size_t augmented;
  int epochs;
  double initial_loss;
  double final_loss;
} cplan_train_summary;

/* Frames come from io.frames or, when empty, from expert recordings of the
 * nominal scenes; anchors from io.anchors or are built from the frames.
 * Writes params.json, loss.csv and anchors.json. */
CPLAN_API cplan_status cplan_cmd_train(const cplan_config* cfg, const char* out_dir,
                                       cplan_train_summary* summary);

typedef struct cplan_suite_summary {
  size_t episodes;
  double success_rate;
  double collision_rate;
  double mean_completion;
  double mean_speed;
  double mean_comfort;
} cplan_suite_summary;

/* Runs io.scenarios (or the generated bench suite) with io.params (learned
 * refinement) or cost-descent refinement when io.params is empty. Writes
 * metrics.csv, episodes/<scenario>.ndjson and plots/<scenario>.csv. */
CPLAN_API cplan_status cplan_cmd_simulate(const cplan_config* cfg, const char* out_dir,
                                          cplan_suite_summary* summary);

typedef struct cplan_bench_summary {
  size_t train_frames;
  size_t episodes; /* per variant */
  cplan_suite_summary variants[3]; /* parallel-baseline, cascaded, cascaded+augment */
} cplan_bench_summary;

/* Variant matrix over one suite. Writes comparison.csv, metrics.csv,
 * alpha_sweep.csv, anchors.json, params/<variant>.json and
 * plots/<variant>/<scenario>.csv. */
CPLAN_API cplan_status cplan_cmd_bench(const cplan_config* cfg, const char* out_dir,
                                       cplan_bench_summary* summary);

/* Expert recordings of the nominal scenes; writes frames.ndjson. */
CPLAN_API cplan_status cplan_cmd_record(const cplan_config* cfg, const char* out_dir,
                                        size_t* frames_written);

/* Re-reads the artifacts a command wrote to `out_dir` and validates them
 * against their schemas. `command` is one of anchors, augment, train,
 * simulate, bench, record. The augment check also rescans every inserted
 * agent against the relabelled rollout using cfg's safety margin (cfg may be
 * NULL for defaults). */
CPLAN_API cplan_status cplan_check_outputs(const cplan_config* cfg, const char* command,
                                           const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* CPLAN_CPLAN_H_ */
