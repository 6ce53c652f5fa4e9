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

#include "infer/infer.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <iostream>
#include <memory>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

#include "bench/bench.hpp"
#include "bench/csv.hpp"
#include "dispatch/dispatch.hpp"
#include "gemm/gemm.hpp"
#include "nn/config.hpp"
#include "nn/encoder.hpp"

struct infer_engine {
  infer::Dispatcher dispatcher;
};

struct infer_model {
  std::unique_ptr<infer::ProfileCache> cache;
  infer::Model model;
};

namespace {

thread_local std::string t_last_error;

template <class F>
infer_status guarded(F&& f) noexcept {
  try {
    t_last_error.clear();
    f();
    return INFER_OK;
  } catch (const std::invalid_argument& e) {
    t_last_error = e.what();
    return INFER_INVALID_ARGUMENT;
  } catch (const std::ios_base::failure& e) {
    t_last_error = e.what();
    return INFER_IO_ERROR;
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return INFER_RUNTIME_ERROR;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return INFER_RUNTIME_ERROR;
  } catch (...) {
    t_last_error = "unknown error";
    return INFER_RUNTIME_ERROR;
  }
}

class IoError : public std::ios_base::failure {
 public:
  using std::ios_base::failure::failure;
};

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

infer::PartitionParams to_params(const infer_partition* p) {
  if (p == nullptr) return infer::PartitionParams::baseline();
  infer::PartitionParams params{p->bm, p->bn, p->bk};
  infer::validate(params);
  return params;
}

infer_partition from_params(const infer::PartitionParams& p) {
  return {static_cast<uint32_t>(p.bm), static_cast<uint32_t>(p.bn), static_cast<uint32_t>(p.bk)};
}

infer::ModelSpec to_spec(const infer_config& c) {
  infer::ModelSpec spec;
  spec.config.layers = c.layers;
  spec.config.heads = c.heads;
  spec.config.d_model = c.d_model;
  spec.config.d_ff = c.d_ff;
  spec.config.d_k = c.d_k;
  spec.config.max_len = c.max_len;
  spec.config.vocab = c.vocab;
  spec.config.layernorm_eps = c.layernorm_eps;
  spec.seed = c.seed;
  infer::validate(spec.config);
  return spec;
}

template <class T>
std::vector<T> to_vector(const T* values, std::size_t count) {
  require(count == 0 || values != nullptr, "list pointer is NULL");
  return std::vector<T>(values, values + count);
}

void emit(const infer::CsvTable& table, const char* out_path) {
  if (out_path == nullptr || std::strcmp(out_path, "-") == 0) {
    infer::write_csv(table, std::cout);
    std::cout.flush();
    return;
  }
  try {
    infer::write_csv(table, std::string(out_path));
  } catch (const std::runtime_error& e) {
    throw IoError(e.what());
  }
}

}  // namespace

extern "C" {

const char* infer_version(void) { return "0.1.0"; }

const char* infer_last_error(void) { return t_last_error.c_str(); }

const char* infer_module_label(size_t index) {
  if (index >= infer::kModuleCats) return nullptr;
  return infer::label(static_cast<infer::ModuleCat>(index)).data();
}

const char* infer_sublayer_label(size_t index) {
  if (index >= infer::kSublayerCats) return nullptr;
  return infer::label(static_cast<infer::SublayerCat>(index)).data();
}

infer_status infer_config_resolve(const char* name_or_path, infer_config* out) {
  return guarded([&] {
    require(name_or_path != nullptr && out != nullptr, "config: NULL argument");
    const infer::ModelSpec spec = infer::resolve_model_spec(name_or_path);
    const auto& c = spec.config;
    *out = {static_cast<uint32_t>(c.layers),  static_cast<uint32_t>(c.heads),
            static_cast<uint32_t>(c.d_model), static_cast<uint32_t>(c.d_ff),
            static_cast<uint32_t>(c.d_k),     static_cast<uint32_t>(c.max_len),
            static_cast<uint32_t>(c.vocab),   c.layernorm_eps,
            spec.seed};
  });
}

infer_status infer_partition_parse(const char* text, infer_partition* out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "partition: NULL argument");
    *out = from_params(infer::parse_partition(text));
  });
}

infer_status infer_default_threads(uint32_t* out) {
  return guarded([&] {
    require(out != nullptr, "threads: NULL argument");
    *out = 1;
    if (const char* env = std::getenv("INFER_NUM_THREADS"); env && *env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0' || v < 1 || v > 1024)
        throw std::invalid_argument(std::string("INFER_NUM_THREADS must be in [1, 1024], got '") +
                                    env + "'");
      *out = static_cast<uint32_t>(v);
    }
  });
}

infer_status infer_engine_create(infer_engine** out) {
  return guarded([&] {
    require(out != nullptr, "engine: NULL out pointer");
    *out = new infer_engine{};
  });
}

void infer_engine_destroy(infer_engine* engine) { delete engine; }

infer_status infer_engine_matmul(infer_engine* engine, const float* a, size_t m, size_t k,
                                 const float* b, size_t b_rows, size_t b_cols,
                                 infer_transpose mode, const infer_partition* partition,
                                 uint32_t threads, float* c, size_t c_len) {
  return guarded([&] {
    require(engine && a && b && c, "matmul: NULL argument");
    require(mode == INFER_NN || mode == INFER_NT, "matmul: unknown transpose mode");
    require(threads >= 1, "matmul: threads must be >= 1");
    const infer::Matrix ma(m, k, std::vector<float>(a, a + m * k));
    const infer::Matrix mb(b_rows, b_cols, std::vector<float>(b, b + b_rows * b_cols));
    const auto tm = mode == INFER_NN ? infer::TransposeMode::NN : infer::TransposeMode::NT;
    const infer::Matrix mc = engine->dispatcher.multiply(ma, mb, tm, to_params(partition), threads);
    require(c_len == mc.size(), "matmul: output buffer length does not match m * n");
    std::memcpy(c, mc.data().data(), mc.size() * sizeof(float));
  });
}

infer_status infer_model_create(const infer_config* config, uint32_t threads, int adaptive,
                                const infer_partition* partition, infer_model** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "model: NULL argument");
    require(threads >= 1, "model: threads must be >= 1");
    const infer::ModelSpec spec = to_spec(*config);
    auto cache = std::make_unique<infer::ProfileCache>();
    infer::Model model = infer::build_model(spec.config, spec.seed, threads, *cache, adaptive != 0,
                                            nullptr, to_params(partition));
    *out = new infer_model{std::move(cache), std::move(model)};
  });
}

void infer_model_destroy(infer_model* model) { delete model; }

size_t infer_model_linear_count(const infer_model* model) {
  return model ? model->model.linear_layers().size() : 0;
}

size_t infer_model_profiles_run(const infer_model* model) {
  return model ? model->cache->profiles_run() : 0;
}

infer_status infer_model_linear_flags(const infer_model* model, size_t index,
                                      uint8_t flags[INFER_FLAG_BUCKETS]) {
  return guarded([&] {
    require(model != nullptr && flags != nullptr, "flags: NULL argument");
    const auto layers = model->model.linear_layers();
    require(index < layers.size(), "flags: linear layer index out of range");
    for (std::size_t i = 0; i < infer::kFlagBuckets; ++i) flags[i] = layers[index]->flags()[i];
  });
}

infer_status infer_model_forward(const infer_model* model, const uint32_t* tokens, size_t count,
                                 uint32_t threads, const infer_partition* partition,
                                 float* pooled, size_t pooled_len, infer_timing* timing) {
  return guarded([&] {
    require(model != nullptr && pooled != nullptr, "forward: NULL argument");
    require(count == 0 || tokens != nullptr, "forward: NULL token list");
    require(pooled_len == model->model.config().d_model,
            "forward: pooled buffer length must equal d_model");
    const auto res = infer::model_forward(model->model, std::span(tokens, count), threads,
                                          to_params(partition));
    std::memcpy(pooled, res.pooled.data().data(), pooled_len * sizeof(float));
    if (timing) {
      for (std::size_t i = 0; i < infer::kModuleCats; ++i)
        timing->module_ns[i] = res.timing.by_module[i];
      for (std::size_t i = 0; i < infer::kSublayerCats; ++i)
        timing->sublayer_ns[i] = res.timing.by_sublayer[i];
      timing->total_ns = res.timing.total;
    }
  });
}

infer_status infer_bench_model(const infer_bench_model_args* args, const char* out_path) {
  return guarded([&] {
    require(args != nullptr && args->cfg != nullptr, "bench-model: NULL argument");
    infer::BenchModelOptions opts;
    opts.cfg_name = args->cfg;
    opts.spec = infer::resolve_model_spec(args->cfg);
    if (args->override_seed) opts.spec.seed = args->seed;
    if (args->seq_len_count) opts.seq_lens = to_vector(args->seq_lens, args->seq_len_count);
    if (args->thread_count) opts.threads = to_vector(args->threads, args->thread_count);
    opts.reps = args->reps;
    opts.params = to_params(&args->partition);
    opts.adaptive = args->adaptive != 0;
    emit(infer::bench_model_table(infer::bench_model_grid(opts)), out_path);
  });
}

infer_status infer_bench_matmul(const infer_bench_matmul_args* args, const char* out_path) {
  return guarded([&] {
    require(args != nullptr && args->cfg != nullptr, "bench-matmul: NULL argument");
    infer::MatmulRatioOptions opts;
    opts.shapes = infer::linear_shapes(infer::resolve_model_spec(args->cfg).config);
    if (args->seq_len_count) opts.seq_lens = to_vector(args->seq_lens, args->seq_len_count);
    for (std::size_t len : opts.seq_lens)
      require(len >= 1, "bench-matmul: sequence lengths must be >= 1");
    if (args->thread_count) opts.threads = to_vector(args->threads, args->thread_count);
    opts.reps = args->reps;
    opts.params = to_params(&args->partition);
    opts.seed = args->seed;
    emit(infer::bench_matmul_ratio(opts), out_path);
  });
}

infer_status infer_bench_dispatch(const infer_bench_dispatch_args* args, const char* out_path) {
  return guarded([&] {
    require(args != nullptr, "bench-dispatch: NULL argument");
    infer::DispatchOverheadOptions opts;
    if (args->shape_count) {
      require(args->shapes != nullptr, "bench-dispatch: NULL shape list");
      opts.shapes.clear();
      for (std::size_t i = 0; i < args->shape_count; ++i) {
        const size_t* s = args->shapes + 3 * i;
        require(s[0] && s[1] && s[2], "bench-dispatch: shape dimensions must be >= 1");
        opts.shapes.push_back({s[0], s[1], s[2]});
      }
    }
    opts.threads = args->threads;
    opts.reps = args->reps;
    opts.params = to_params(&args->partition);
    opts.full = args->path != INFER_PATH_FAST;
    opts.fast = args->path != INFER_PATH_FULL;
    opts.seed = args->seed;
    emit(infer::dispatch_overhead_table(infer::bench_dispatch_overhead(opts)), out_path);
  });
}

infer_status infer_sweep_partition(const infer_sweep_args* args, const char* out_path) {
  bool all_pass = true;
  const infer_status st = guarded([&] {
    require(args != nullptr && args->cfg != nullptr, "sweep-partition: NULL argument");
    require(args->seq_len >= 1, "sweep-partition: sequence length must be >= 1");
    infer::SweepOptions opts;
    opts.cfg_name = args->cfg;
    if (args->bk_count) opts.bk_values = to_vector(args->bk_values, args->bk_count);
    opts.shapes = infer::sweep_shapes(infer::resolve_model_spec(args->cfg).config, args->seq_len);
    opts.modes.clear();
    if (args->include_nn) opts.modes.push_back(infer::TransposeMode::NN);
    if (args->include_nt) opts.modes.push_back(infer::TransposeMode::NT);
    require(!opts.modes.empty(), "sweep-partition: no transpose mode selected");
    if (args->thread_count) opts.threads = to_vector(args->threads, args->thread_count);
    opts.reps = args->reps;
    opts.bm = args->bm;
    opts.bn = args->bn;
    opts.seed = args->seed;
    const infer::CsvTable table = infer::sweep_partition(opts);
    emit(table, out_path);
    const std::size_t pass_col = table.header.size() - 1;
    for (const auto& row : table.rows)
      if (std::get<std::int64_t>(row[pass_col]) != 1) all_pass = false;
  });
  if (st == INFER_OK && !all_pass) {
    t_last_error = "sweep-partition: a row exceeded the 1e-4 error bound";
    return INFER_RUNTIME_ERROR;
  }
  return st;
}

}  // extern "C"
