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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "doctest.h"
#include "infer/infer.h"

namespace {

infer_config tiny_config() {
  infer_config c{};
  c.layers = 1;
  c.heads = 2;
  c.d_model = 16;
  c.d_ff = 32;
  c.d_k = 8;
  c.max_len = 32;
  c.vocab = 20;
  c.layernorm_eps = 1e-12f;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("metadata") {
  CHECK(std::string(infer_version()) == "0.1.0");
  CHECK(std::string(infer_module_label(0)) == "linear");
  CHECK(std::string(infer_sublayer_label(8)) == "other");
  CHECK(infer_module_label(INFER_MODULE_CATEGORIES) == nullptr);
}

TEST_CASE("config and partition parsing") {
  infer_config c{};
  REQUIRE(infer_config_resolve("bert-large", &c) == INFER_OK);
  CHECK(c.layers == 24);
  CHECK(c.d_model == 1024);
  CHECK(c.seed == 42);
  CHECK(infer_config_resolve("missing.json", &c) == INFER_INVALID_ARGUMENT);
  CHECK(std::strlen(infer_last_error()) > 0);
  CHECK(infer_config_resolve(nullptr, &c) == INFER_INVALID_ARGUMENT);

  infer_partition p{};
  REQUIRE(infer_partition_parse("patched", &p) == INFER_OK);
  CHECK(p.bk == 64);
  CHECK(infer_partition_parse("1,2", &p) == INFER_INVALID_ARGUMENT);
}

TEST_CASE("default threads") {
  uint32_t t = 0;
  ::unsetenv("INFER_NUM_THREADS");
  REQUIRE(infer_default_threads(&t) == INFER_OK);
  CHECK(t == 1);
  ::setenv("INFER_NUM_THREADS", "3", 1);
  REQUIRE(infer_default_threads(&t) == INFER_OK);
  CHECK(t == 3);
  ::setenv("INFER_NUM_THREADS", "zero", 1);
  CHECK(infer_default_threads(&t) == INFER_INVALID_ARGUMENT);
  ::unsetenv("INFER_NUM_THREADS");
}

TEST_CASE("engine matmul") {
  infer_engine* e = nullptr;
  REQUIRE(infer_engine_create(&e) == INFER_OK);
  const float a[] = {1, 2, 3, 4};
  const float b[] = {5, 6, 7, 8};
  const float bt[] = {5, 7, 6, 8};
  float c[4] = {};
  REQUIRE(infer_engine_matmul(e, a, 2, 2, b, 2, 2, INFER_NN, nullptr, 1, c, 4) == INFER_OK);
  CHECK(c[0] == 19);
  CHECK(c[3] == 50);
  float c2[4] = {};
  REQUIRE(infer_engine_matmul(e, a, 2, 2, bt, 2, 2, INFER_NT, nullptr, 2, c2, 4) == INFER_OK);
  CHECK(std::memcmp(c, c2, sizeof c) == 0);

  CHECK(infer_engine_matmul(e, a, 2, 2, b, 1, 4, INFER_NN, nullptr, 1, c, 4) ==
        INFER_INVALID_ARGUMENT);
  CHECK(infer_engine_matmul(e, a, 2, 2, b, 2, 2, INFER_NN, nullptr, 1, c, 3) ==
        INFER_INVALID_ARGUMENT);
  CHECK(infer_engine_matmul(nullptr, a, 2, 2, b, 2, 2, INFER_NN, nullptr, 1, c, 4) ==
        INFER_INVALID_ARGUMENT);
  infer_engine_destroy(e);
  infer_engine_destroy(nullptr);
}

TEST_CASE("model lifecycle") {
  const infer_config cfg = tiny_config();
  infer_model* m = nullptr;
  REQUIRE(infer_model_create(&cfg, 1, 0, nullptr, &m) == INFER_OK);
  CHECK(infer_model_linear_count(m) == 7);
  CHECK(infer_model_profiles_run(m) == 0);
  uint8_t flags[INFER_FLAG_BUCKETS];
  REQUIRE(infer_model_linear_flags(m, 0, flags) == INFER_OK);
  for (uint8_t f : flags) CHECK(f == 1);
  CHECK(infer_model_linear_flags(m, 7, flags) == INFER_INVALID_ARGUMENT);

  const uint32_t tokens[] = {1, 2, 3, 4};
  std::vector<float> pooled(16), again(16);
  infer_timing timing{};
  REQUIRE(infer_model_forward(m, tokens, 4, 1, nullptr, pooled.data(), 16, &timing) == INFER_OK);
  CHECK(timing.total_ns > 0);
  REQUIRE(infer_model_forward(m, tokens, 4, 2, nullptr, again.data(), 16, nullptr) == INFER_OK);
  CHECK(pooled == again);

  const uint32_t bad[] = {20};
  CHECK(infer_model_forward(m, bad, 1, 1, nullptr, pooled.data(), 16, nullptr) ==
        INFER_INVALID_ARGUMENT);
  CHECK(infer_model_forward(m, tokens, 4, 1, nullptr, pooled.data(), 8, nullptr) ==
        INFER_INVALID_ARGUMENT);
  infer_model_destroy(m);

  REQUIRE(infer_model_create(&cfg, 1, 1, nullptr, &m) == INFER_OK);
  CHECK(infer_model_profiles_run(m) == 3);
  infer_model_destroy(m);

  infer_config broken = cfg;
  broken.d_k = 3;
  CHECK(infer_model_create(&broken, 1, 0, nullptr, &m) == INFER_INVALID_ARGUMENT);
}

TEST_CASE("bench entry points") {
  const size_t shapes[] = {2, 8, 8};
  infer_bench_dispatch_args d{};
  d.shapes = shapes;
  d.shape_count = 1;
  d.threads = 1;
  d.reps = 1000;
  d.partition = {64, 64, 384};
  d.path = INFER_PATH_FAST;
  CHECK(infer_bench_dispatch(&d, "capi_dispatch.csv") == INFER_INVALID_ARGUMENT);
  d.path = INFER_PATH_FULL;
  CHECK(infer_bench_dispatch(&d, "capi_dispatch.csv") == INFER_OK);
  CHECK(infer_bench_dispatch(&d, "/nonexistent-dir/out.csv") == INFER_IO_ERROR);
  std::remove("capi_dispatch.csv");

  const size_t bk[] = {16};
  const size_t threads[] = {1};
  infer_sweep_args s{};
  s.cfg = "distil";
  s.bk_values = bk;
  s.bk_count = 1;
  s.seq_len = 2;
  s.threads = threads;
  s.thread_count = 1;
  s.reps = 1;
  s.bm = 64;
  s.bn = 64;
  s.include_nn = 1;
  s.include_nt = 0;
  s.seed = 1;
  CHECK(infer_sweep_partition(&s, "capi_sweep.csv") == INFER_OK);
  std::remove("capi_sweep.csv");
  CHECK(infer_bench_model(nullptr, nullptr) == INFER_INVALID_ARGUMENT);
}
