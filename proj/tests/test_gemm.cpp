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
#include <vector>

#include "core/tensor.hpp"
#include "doctest.h"
#include "gemm/gemm.hpp"

using namespace infer;

namespace {

Matrix rhs_for(const Matrix& b_normal, TransposeMode mode) {
  return mode == TransposeMode::NN ? b_normal : transpose(b_normal);
}

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return lo + rng.next_u64() % (hi - lo + 1);
}

}  // namespace

TEST_CASE("hand examples") {
  const Matrix a = Matrix::from_rows({{1, 2}, {3, 4}});
  const Matrix b = Matrix::from_rows({{5, 6}, {7, 8}});
  const Matrix want = Matrix::from_rows({{19, 22}, {43, 50}});
  CHECK(gemm_naive(a, b, TransposeMode::NN) == want);
  CHECK(gemm_naive(a, transpose(b), TransposeMode::NT) == want);
  CHECK(gemm_blocked(a, b, TransposeMode::NN, {1, 1, 1}, 1) == want);
  CHECK(gemm_blocked(a, transpose(b), TransposeMode::NT, {64, 64, 384}, 4) == want);

  const Matrix row = Matrix::from_rows({{1, 2, 3}});
  const Matrix col = Matrix::from_rows({{4}, {5}, {6}});
  CHECK(gemm_blocked(row, col, TransposeMode::NN, PartitionParams::patched(), 2) ==
        Matrix::from_rows({{32}}));
}

TEST_CASE("shape checks") {
  const Matrix a(3, 768);
  const Matrix b(767, 5);
  CHECK_THROWS_AS(gemm_shape(a, b, TransposeMode::NN), std::invalid_argument);
  CHECK_THROWS_AS(gemm_blocked(a, b, TransposeMode::NN, {}, 1), std::invalid_argument);
  CHECK(gemm_shape(a, Matrix(5, 768), TransposeMode::NT) == GemmShape{3, 5, 768});
  CHECK_THROWS_AS(validate(PartitionParams{0, 64, 64}), std::invalid_argument);
  CHECK_THROWS_AS(gemm_blocked(a, Matrix(768, 2), TransposeMode::NN, {}, 0),
                  std::invalid_argument);
}

TEST_CASE("blocked matches the naive oracle on random cases") {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t m = pick(rng, 1, 96), n = pick(rng, 1, 96), k = pick(rng, 1, 160);
    const TransposeMode mode = rng.next_u64() % 2 ? TransposeMode::NT : TransposeMode::NN;
    const PartitionParams p{pick(rng, 1, 80), pick(rng, 1, 80), pick(rng, 1, 200)};
    const Matrix a = random_matrix(m, k, rng);
    const Matrix b = rhs_for(random_matrix(k, n, rng), mode);
    const Matrix ref = gemm_naive(a, b, mode);
    const Matrix got = gemm_blocked(a, b, mode, p, pick(rng, 1, 4));
    CAPTURE(m);
    CAPTURE(n);
    CAPTURE(k);
    CHECK(max_rel_err(ref, got) <= 1e-4);
  }
}

TEST_CASE("ragged dimensions") {
  Rng rng(5);
  for (std::size_t d : {7u, 13u, 769u}) {
    const Matrix a = random_matrix(d, 13, rng);
    const Matrix b = random_matrix(13, d, rng);
    for (auto mode : {TransposeMode::NN, TransposeMode::NT}) {
      const Matrix rhs = rhs_for(b, mode);
      CHECK(gemm_blocked(a, rhs, mode, PartitionParams::baseline(), 3) ==
            gemm_naive(a, rhs, mode));
    }
  }
}

TEST_CASE("output is independent of threads, partition and form") {
  Rng rng(11);
  const Matrix a = random_matrix(70, 300, rng);
  const Matrix b = random_matrix(300, 90, rng);
  const Matrix bt = transpose(b);
  const Matrix ref = gemm_blocked(a, b, TransposeMode::NN, PartitionParams::baseline(), 1);
  for (std::size_t threads : {1u, 2u, 4u, 16u}) {
    for (PartitionParams p : {PartitionParams::baseline(), PartitionParams::patched(),
                              PartitionParams{5, 17, 3}, PartitionParams{512, 512, 512}}) {
      CHECK(gemm_blocked(a, b, TransposeMode::NN, p, threads) == ref);
      CHECK(gemm_blocked(a, bt, TransposeMode::NT, p, threads) == ref);
    }
  }
}

TEST_CASE("plan covers the block grid") {
  const BlockPlan plan = make_plan({130, 65, 10}, TransposeMode::NN, {64, 64, 4}, 4);
  CHECK(plan.m_blocks == 3);
  CHECK(plan.n_blocks == 2);
  CHECK(plan.workers() == 4);
  CHECK(plan.worker_first.front() == 0);
  CHECK(plan.worker_first.back() == 6);
  for (std::size_t w = 0; w < plan.workers(); ++w)
    CHECK(plan.worker_first[w] <= plan.worker_first[w + 1]);
  // Fewer blocks than threads.
  const BlockPlan small = make_plan({1, 1, 1}, TransposeMode::NT, {64, 64, 64}, 8);
  CHECK(small.worker_first.back() == 1);
}

TEST_CASE("batched") {
  CHECK(gemm_batched({}, PartitionParams::baseline(), 4).empty());

  Rng rng(9);
  std::vector<GemmTask> tasks;
  for (int h = 0; h < 12; ++h)
    tasks.push_back({random_matrix(8, 8, rng), random_matrix(8, 8, rng),
                     h % 2 ? TransposeMode::NT : TransposeMode::NN});
  const auto out = gemm_batched(tasks, PartitionParams::baseline(), 4);
  REQUIRE(out.size() == 12);
  for (std::size_t i = 0; i < tasks.size(); ++i)
    CHECK(out[i] == gemm_naive(tasks[i].a, tasks[i].b, tasks[i].mode));

  std::vector<GemmTask> same(5, tasks[0]);
  const auto dup = gemm_batched(same, PartitionParams::patched(), 3);
  for (const auto& m : dup) CHECK(m == dup[0]);

  std::vector<GemmTask> bad{tasks[0], {Matrix(2, 3), Matrix(4, 2), TransposeMode::NN}};
  CHECK_THROWS_AS(gemm_batched(bad, PartitionParams::baseline(), 2), std::invalid_argument);
}
