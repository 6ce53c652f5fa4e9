// Copyright 2026 The infer Authors. All Rights Reserved.
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

/*
 * infer: CPU inference micro-engine for Transformer-encoder workloads.
 *
 * C interface. Every handle is opaque and owned by the caller once created.
 * Functions return an infer_status; on failure infer_last_error() describes
 * the problem (the message is thread-local and valid until the next call on
 * the same thread).
 */
#ifndef INFER_INFER_H_
#define INFER_INFER_H_

#include <stddef.h>
#include <stdint.h>

#if defined(INFER_BUILDING_LIBRARY)
#define INFER_API __attribute__((visibility("default")))
#else
#define INFER_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum infer_status {
  INFER_OK = 0,
  INFER_INVALID_ARGUMENT = 1, /* bad flags, shapes or config */
  INFER_IO_ERROR = 2,
  INFER_RUNTIME_ERROR = 3
} infer_status;

typedef enum infer_transpose {
  INFER_NN = 0, /* B stored [K x N] */
  INFER_NT = 1  /* B stored [N x K] */
} infer_transpose;

#define INFER_FLAG_BUCKETS 10
#define INFER_MODULE_CATEGORIES 6
#define INFER_SUBLAYER_CATEGORIES 9

typedef struct infer_config {
  uint32_t layers;
  uint32_t heads;
  uint32_t d_model;
  uint32_t d_ff;
  uint32_t d_k;
  uint32_t max_len;
  uint32_t vocab;
  float layernorm_eps;
  uint64_t seed;
} infer_config;

typedef struct infer_partition {
  uint32_t bm;
  uint32_t bn;
  uint32_t bk;
} infer_partition;

/* Nanoseconds per category for one forward pass. Index order matches
 * infer_module_label / infer_sublayer_label. */
typedef struct infer_timing {
  int64_t module_ns[INFER_MODULE_CATEGORIES];
  int64_t sublayer_ns[INFER_SUBLAYER_CATEGORIES];
  int64_t total_ns;
} infer_timing;

typedef struct infer_engine infer_engine;
typedef struct infer_model infer_model;

INFER_API const char* infer_version(void);
INFER_API const char* infer_last_error(void);

INFER_API const char* infer_module_label(size_t index);
INFER_API const char* infer_sublayer_label(size_t index);

/* "bert-base", "bert-large", "distil" or a path to a JSON config. */
INFER_API infer_status infer_config_resolve(const char* name_or_path, infer_config* out);

/* "baseline" (64,64,384), "patched" (64,64,64) or "bm,bn,bk". */
INFER_API infer_status infer_partition_parse(const char* text, infer_partition* out);

/* Thread count from the INFER_NUM_THREADS environment variable, 1 if unset. */
INFER_API infer_status infer_default_threads(uint32_t* out);

/* ---- Matrix multiply through the dispatcher --------------------------- */

INFER_API infer_status infer_engine_create(infer_engine** out);
INFER_API void infer_engine_destroy(infer_engine* engine);

/* c[m x n] = a[m x k] * op(b). Row-major buffers. threads == 1 takes the
 * validating dispatch path; threads > 1 the memoized fast path. */
INFER_API infer_status infer_engine_matmul(infer_engine* engine, const float* a, size_t m,
                                           size_t k, const float* b, size_t b_rows,
                                           size_t b_cols, infer_transpose mode,
                                           const infer_partition* partition, uint32_t threads,
                                           float* c, size_t c_len);

/* ---- Encoder model ---------------------------------------------------- */

/* Builds a model with deterministic weights from config->seed. With
 * adaptive != 0 each distinct linear shape is profiled once; otherwise every
 * layer uses the transposed weight form. */
INFER_API infer_status infer_model_create(const infer_config* config, uint32_t threads,
                                          int adaptive, const infer_partition* partition,
                                          infer_model** out);
INFER_API void infer_model_destroy(infer_model* model);

INFER_API size_t infer_model_linear_count(const infer_model* model);
INFER_API size_t infer_model_profiles_run(const infer_model* model);
INFER_API infer_status infer_model_linear_flags(const infer_model* model, size_t index,
                                                uint8_t flags[INFER_FLAG_BUCKETS]);

/* pooled must hold d_model floats; timing may be NULL. */
INFER_API infer_status infer_model_forward(const infer_model* model, const uint32_t* tokens,
                                           size_t count, uint32_t threads,
                                           const infer_partition* partition, float* pooled,
                                           size_t pooled_len, infer_timing* timing);

/* ---- Benchmarks (CSV to out_path, stdout when NULL or "-") ------------- */

typedef struct infer_bench_model_args {
  const char* cfg;
  const size_t* seq_lens;
  size_t seq_len_count;
  const size_t* threads;
  size_t thread_count;
  size_t reps;
  infer_partition partition;
  int adaptive;
  int override_seed;
  uint64_t seed;
} infer_bench_model_args;

typedef struct infer_bench_matmul_args {
  const char* cfg; /* weight shapes come from this config */
  const size_t* seq_lens;
  size_t seq_len_count;
  const size_t* threads;
  size_t thread_count;
  size_t reps;
  infer_partition partition;
  uint64_t seed;
} infer_bench_matmul_args;

typedef enum infer_dispatch_path {
  INFER_PATH_BOTH = 0,
  INFER_PATH_FULL = 1,
  INFER_PATH_FAST = 2
} infer_dispatch_path;

typedef struct infer_bench_dispatch_args {
  const size_t* shapes; /* m,k,n triples */
  size_t shape_count;
  size_t threads;
  size_t reps;
  infer_partition partition;
  infer_dispatch_path path;
  uint64_t seed;
} infer_bench_dispatch_args;

typedef struct infer_sweep_args {
  const char* cfg;
  const size_t* bk_values;
  size_t bk_count;
  size_t seq_len;
  const size_t* threads;
  size_t thread_count;
  size_t reps;
  uint32_t bm;
  uint32_t bn;
  int include_nn;
  int include_nt;
  uint64_t seed;
} infer_sweep_args;

INFER_API infer_status infer_bench_model(const infer_bench_model_args* args, const char* out_path);
INFER_API infer_status infer_bench_matmul(const infer_bench_matmul_args* args,
                                          const char* out_path);
INFER_API infer_status infer_bench_dispatch(const infer_bench_dispatch_args* args,
                                            const char* out_path);
/* Fails with INFER_RUNTIME_ERROR if any row exceeds the 1e-4 error bound
 * (the CSV is still written). */
INFER_API infer_status infer_sweep_partition(const infer_sweep_args* args, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif /* INFER_INFER_H_ */
