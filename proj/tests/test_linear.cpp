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

#include <stdexcept>
#include <thread>
#include <vector>

#include "doctest.h"
#include "nn/encoder.hpp"
#include "nn/linear.hpp"
#include "synthetic_timer.hpp"

using namespace infer;
using infer::testing::FlatTimer;
using infer::testing::SyntheticTimer;

TEST_CASE("bucket index") {
  CHECK(bucket_index(1) == 0);
  CHECK(bucket_index(2) == 1);
  CHECK(bucket_index(3) == 1);
  CHECK(bucket_index(8) == 3);
  CHECK(bucket_index(384) == 8);
  CHECK(bucket_index(511) == 8);
  CHECK(bucket_index(512) == 9);
  CHECK(bucket_index(100000) == 9);
  CHECK_THROWS_AS(bucket_index(0), std::invalid_argument);
}

TEST_CASE("synthetic timer drives the flags") {
  ProfileCache cache;
  Dispatcher disp;
  SyntheticTimer timer;
  const TransposeFlags f = profile_linear(768, 3072, 1, cache, timer, disp);
  for (std::size_t i = 0; i < kFlagBuckets; ++i) CHECK(f[i] == (i >= 5));
  CHECK(timer.calls == kFlagBuckets * 2 * (kProfileWarmup + kProfileTimed));
  CHECK(cache.profiles_run() == 1);

  SyntheticTimer again;
  CHECK(profile_linear(768, 3072, 1, cache, again, disp) == f);
  CHECK(again.calls == 0);
  CHECK(cache.profiles_run() == 1);

  // Another thread count is another key.
  (void)profile_linear(768, 3072, 2, cache, again, disp);
  CHECK(cache.profiles_run() == 2);
  CHECK(cache.size() == 2);
}

TEST_CASE("ties choose the transposed form") {
  ProfileCache cache;
  Dispatcher disp;
  FlatTimer timer;
  CHECK(profile_linear(16, 8, 1, cache, timer, disp) == TransposeFlags::all(true));
}

TEST_CASE("concurrent first use profiles once") {
  ProfileCache cache;
  Dispatcher disp;
  std::vector<std::thread> pool;
  std::vector<TransposeFlags> seen(6);
  for (int t = 0; t < 6; ++t)
    pool.emplace_back([&, t] {
      SyntheticTimer timer(3);
      seen[t] = profile_linear(64, 32, 1, cache, timer, disp);
    });
  for (auto& th : pool) th.join();
  CHECK(cache.profiles_run() == 1);
  for (const auto& f : seen) CHECK(f == seen[0]);
}

TEST_CASE("bert-base needs three profiles") {
  ProfileCache cache;
  SyntheticTimer timer;
  const Model model = build_model(bert_base(), kDefaultSeed, 1, cache, true, &timer);
  CHECK(model.linear_layers().size() == 73);
  CHECK(cache.profiles_run() == 3);
  for (const LinearLayer* l : model.linear_layers())
    for (std::size_t i = 0; i < kFlagBuckets; ++i) CHECK(l->flags()[i] == (i >= 5));
}

TEST_CASE("linear forward") {
  Dispatcher disp;
  Rng rng(8);
  const Matrix w = random_matrix(6, 4, rng);
  const std::vector<float> bias{0.5f, -1.0f, 2.0f, 0.0f};

  const LinearLayer layer(w, bias);
  const Matrix y = linear_forward(Matrix(3, 6, 0.0f), layer, 1, PartitionParams::baseline(), disp);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(y(i, j) == bias[j]);

  const Matrix x = random_matrix(5, 6, rng);
  const LinearLayer nn(w, bias, TransposeFlags::all(false));
  const LinearLayer nt(w, bias, TransposeFlags::all(true));
  CHECK(nn.mode_for(5) == TransposeMode::NN);
  CHECK(nt.mode_for(5) == TransposeMode::NT);
  const Matrix a = linear_forward(x, nn, 1, PartitionParams::baseline(), disp);
  const Matrix b = linear_forward(x, nt, 2, PartitionParams::patched(), disp);
  CHECK(a == b);
  Matrix want = gemm_naive(x, w, TransposeMode::NN);
  add_bias_rows(want, bias);
  CHECK(a == want);

  CHECK_THROWS_AS(linear_forward(Matrix(2, 5), nn, 1, {}, disp), std::invalid_argument);
  CHECK_THROWS_AS(LinearLayer(w, {1.0f}), std::invalid_argument);
}
