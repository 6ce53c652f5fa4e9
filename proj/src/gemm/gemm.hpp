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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/tensor.hpp"

namespace infer {

/// NN: C = A * B with B stored [K x N].
/// NT: C = A * B^T with B stored [N x K].
enum class TransposeMode { NN, NT };

const char* to_string(TransposeMode mode) noexcept;

/// Blocking triple for the K -> M -> N loop nest. All components >= 1.
struct PartitionParams {
  std::size_t bm = 64;
  std::size_t bn = 64;
  std::size_t bk = 384;

  static constexpr PartitionParams baseline() noexcept { return {64, 64, 384}; }
  static constexpr PartitionParams patched() noexcept { return {64, 64, 64}; }

  bool operator==(const PartitionParams&) const = default;
};

void validate(const PartitionParams& params);

struct GemmShape {
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;

  bool operator==(const GemmShape&) const = default;
};

/// Shape of the product, or invalid_argument if the inner dimensions
/// disagree under `mode`.
GemmShape gemm_shape(const Matrix& a, const Matrix& b, TransposeMode mode);

/// Reference triple loop, i -> j -> k, 32-bit accumulation in ascending k.
Matrix gemm_naive(const Matrix& a, const Matrix& b, TransposeMode mode);

/// Static schedule for one blocked multiply. The (M-block x N-block) grid is
/// enumerated row-major and split into `workers` contiguous ranges; each
/// worker owns its blocks for every K step.
struct BlockPlan {
  GemmShape shape;
  TransposeMode mode = TransposeMode::NN;
  PartitionParams params;
  std::size_t m_blocks = 0;
  std::size_t n_blocks = 0;
  std::vector<std::size_t> worker_first;  // size workers + 1

  std::size_t workers() const noexcept { return worker_first.size() - 1; }
};

BlockPlan make_plan(const GemmShape& shape, TransposeMode mode, const PartitionParams& params,
                    std::size_t threads);

/// Runs blocks [first, last) of `plan` on the calling thread, accumulating
/// into `c`.
void run_blocks(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c,
                std::size_t first, std::size_t last);

/// Executes a plan into a zeroed `c`. Uses the shared pool when the plan has
/// more than one worker.
void execute_plan(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c);

/// Blocked multiply. Each output element accumulates in ascending k no
/// matter how the work is split, so the result is bitwise independent of
/// `threads` and of the partition parameters.
Matrix gemm_blocked(const Matrix& a, const Matrix& b, TransposeMode mode,
                    const PartitionParams& params, std::size_t threads);

struct GemmTask {
  Matrix a;
  Matrix b;
  TransposeMode mode = TransposeMode::NN;
};

/// Independent multiplies distributed across workers, one task per worker
/// at a time. Result i is bitwise equal to gemm_blocked on task i.
std::vector<Matrix> gemm_batched(std::span<const GemmTask> tasks, const PartitionParams& params,
                                 std::size_t threads);

}  // namespace infer
