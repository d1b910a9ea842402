/*
 * Copyright 2026 The multigrasp Authors
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
 * C interface to the multigrasp shared library.
 *
 * Conventions:
 *   - Every object is an opaque handle created by an mg_*_load/create call
 *     and released by the matching mg_*_free. Freeing NULL is a no-op.
 *   - On failure, functions return NULL (pointers) or -1 (integers), and
 *     mg_last_error_code / mg_last_error_message describe the failure for
 *     the calling thread until the next API call on that thread.
 *   - Functions returning char* hand ownership to the caller; release the
 *     buffer with mg_string_free.
 *   - Documents are JSON unless stated otherwise; clouds are PLY files.
 */
#ifndef MULTIGRASP_CAPI_H
#define MULTIGRASP_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct mg_config mg_config;
typedef struct mg_dataset mg_dataset;
typedef struct mg_model mg_model;

/* Error reporting: code 0 means the last call on this thread succeeded.
 * Nonzero codes match the library's error taxonomy (invalid argument,
 * malformed input, empty split, no feasible grasp, ...). The message buffer
 * is owned by the library; do not free it. */
int mg_last_error_code(void);
const char* mg_last_error_message(void);

/* Releases a string returned by this API. */
void mg_string_free(char* text);

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/* ------------------------------------------------------------------ */

/* Built-in defaults (desk-scale gripper, 512-point encodings). */
mg_config* mg_config_default(void);
/* Loads a JSON config; unknown keys are rejected. */
mg_config* mg_config_load(const char* path);
/* Full config as JSON, defaults filled in. */
char* mg_config_format(const mg_config* config);
void mg_config_free(mg_config* config);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */
/* ------------------------------------------------------------------ */

/* Generates a labeled dataset from the built-in object catalog using the
 * config's dataset section. Deterministic in (config, seed). */
mg_dataset* mg_dataset_build(const mg_config* config, uint64_t seed);
/* Loads a dataset saved by mg_dataset_save: a directory layout, or a
 * single .jsonl file when the path ends in ".jsonl". */
mg_dataset* mg_dataset_load(const char* path);
/* Saves in the layout implied by the path (see mg_dataset_load). */
int mg_dataset_save(const mg_dataset* dataset, const char* path);
int64_t mg_dataset_size(const mg_dataset* dataset);
/* Exemplar count, per-type positive-label rates, object ids. */
char* mg_dataset_stats_json(const mg_dataset* dataset);
void mg_dataset_free(mg_dataset* dataset);

/* ------------------------------------------------------------------ */
/* Models                                                              */
/* ------------------------------------------------------------------ */

/* Fresh network with randomly initialized weights. */
mg_model* mg_model_create(const mg_config* config, uint64_t seed);
/* Loads a checkpoint written by mg_model_save. */
mg_model* mg_model_load(const char* path);
int mg_model_save(const mg_model* model, const char* path);
int64_t mg_model_param_count(const mg_model* model);
void mg_model_free(mg_model* model);

/* ------------------------------------------------------------------ */
/* Training and evaluation                                             */
/* ------------------------------------------------------------------ */

/* Trains the model in place on a seeded random split of the dataset and
 * returns the per-epoch log as CSV. The model keeps the weights of its
 * best test-accuracy epoch. */
char* mg_train(mg_model* model, const mg_dataset* dataset,
               const mg_config* config, uint64_t seed);

/* Multi-seed split evaluation. split is "random" or "object"; mode is
 * "combined" (one shared network) or "separate" (one network per grasp
 * type). Returns the evaluation report as JSON. */
char* mg_eval_split(const mg_dataset* dataset, const char* split,
                    const char* mode, const mg_config* config, uint64_t seed);

/* ------------------------------------------------------------------ */
/* Detection, benchmark, visualization                                 */
/* ------------------------------------------------------------------ */

/* Ranks grasps on a scene (captured through the scene's cameras) or on a
 * point-cloud file. `model` may be NULL: a randomly initialized network
 * seeded from `seed` is used and the output notes it. `k` <= 0 uses the
 * config's candidate count. `types_csv` is a comma-separated list of grasp
 * type names, or NULL for all five. Returns the ranked decisions as JSON. */
char* mg_detect_scene(const mg_config* config, const char* scene_path,
                      const mg_model* model, int k, const char* types_csv,
                      uint64_t seed);
char* mg_detect_cloud(const mg_config* config, const char* cloud_path,
                      const mg_model* model, int k, const char* types_csv,
                      uint64_t seed);

/* Clutter-clearing benchmark over the standard ablations (all five types;
 * the two basic types; pincher only) on shared seeded scenes. `model` may
 * be NULL as in mg_detect_scene. `trials` <= 0 uses the config. Returns
 * the benchmark report as JSON, one trial log per scene per ablation. */
char* mg_clutter_bench(const mg_config* config, const mg_model* model,
                       int trials, uint64_t seed);

/* Renders a detection report over its cloud as a colored ASCII PLY file:
 * the top decision's crop region in bright green, other decisions dimmer,
 * remaining points gray. */
int mg_viz(const mg_config* config, const char* cloud_path,
           const char* decisions_path, const char* out_ply_path);

#ifdef __cplusplus
}
#endif

#endif /* MULTIGRASP_CAPI_H */
