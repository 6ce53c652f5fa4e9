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

#include "gemm/gemm.hpp"

#include <algorithm>
#include <stdexcept>

#include "core/thread_pool.hpp"

namespace infer {
namespace {

// Register tile. 4 x 32 floats is 8 zmm / 16 ymm accumulators.
constexpr std::size_t kMR = 4;
constexpr std::size_t kNR = 32;
// Depth of one transposed B micro-panel on the NT path.
constexpr std::size_t kKC = 64;

// c[r][l] += sum_k a[r][k] * b[k][l], k ascending, r < MR, l < NR.
template <std::size_t MR, std::size_t NR>
inline void tile_full(const float* a, std::size_t lda, const float* b, std::size_t ldb, float* c,
                      std::size_t ldc, std::size_t kc) {
  float acc[MR][NR];
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t l = 0; l < NR; ++l) acc[r][l] = c[r * ldc + l];
  for (std::size_t k = 0; k < kc; ++k) {
    const float* brow = b + k * ldb;
    for (std::size_t r = 0; r < MR; ++r) {
      const float ar = a[r * lda + k];
      for (std::size_t l = 0; l < NR; ++l) acc[r][l] += ar * brow[l];
    }
  }
  for (std::size_t r = 0; r < MR; ++r)
    for (std::size_t l = 0; l < NR; ++l) c[r * ldc + l] = acc[r][l];
}

// Ragged edge of tile_full with runtime extents.
inline void tile_edge(const float* a, std::size_t lda, const float* b, std::size_t ldb, float* c,
                      std::size_t ldc, std::size_t mr, std::size_t nr, std::size_t kc) {
  for (std::size_t r = 0; r < mr; ++r) {
    float* crow = c + r * ldc;
    for (std::size_t k = 0; k < kc; ++k) {
      const float ar = a[r * lda + k];
      const float* brow = b + k * ldb;
      for (std::size_t l = 0; l < nr; ++l) crow[l] += ar * brow[l];
    }
  }
}

// Panel multiply with B laid out [k][n]: rows of A against a kc x nr panel.
inline void panel(const float* a, std::size_t lda, const float* b, std::size_t ldb, float* c,
                  std::size_t ldc, std::size_t rows, std::size_t nr, std::size_t kc) {
  std::size_t r = 0;
  if (nr == kNR) {
    for (; r + kMR <= rows; r += kMR)
      tile_full<kMR, kNR>(a + r * lda, lda, b, ldb, c + r * ldc, ldc, kc);
    for (; r < rows; ++r) tile_full<1, kNR>(a + r * lda, lda, b, ldb, c + r * ldc, ldc, kc);
  } else {
    tile_edge(a, lda, b, ldb, c, ldc, rows, nr, kc);
  }
}

// C[i0:i1, j0:j1] += A[i0:i1, p0:p1] * B[p0:p1, j0:j1], B stored [K x N].
// B is read row-wise along n.
void block_nn(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i0, std::size_t i1,
              std::size_t j0, std::size_t j1, std::size_t p0, std::size_t p1) {
  const std::size_t lda = a.cols();
  const std::size_t ldb = b.cols();
  const std::size_t ldc = c.cols();
  const float* pa = a.data().data() + i0 * lda + p0;
  const float* pb = b.data().data() + p0 * ldb;
  float* pc = c.data().data() + i0 * ldc;
  for (std::size_t j = j0; j < j1; j += kNR) {
    const std::size_t nr = std::min(kNR, j1 - j);
    panel(pa, lda, pb + j, ldb, pc + j, ldc, i1 - i0, nr, p1 - p0);
  }
}

// Same product with B stored [N x K] and read row-wise along k. Each
// nr x kc slice of B is turned into a kc x nr micro-panel on the stack and
// fed to the same register tile, so per-element order stays ascending k.
void block_nt(const Matrix& a, const Matrix& bt, Matrix& c, std::size_t i0, std::size_t i1,
              std::size_t j0, std::size_t j1, std::size_t p0, std::size_t p1) {
  const std::size_t lda = a.cols();
  const std::size_t ldb = bt.cols();
  const std::size_t ldc = c.cols();
  alignas(64) float buf[kKC * kNR];
  for (std::size_t j = j0; j < j1; j += kNR) {
    const std::size_t nr = std::min(kNR, j1 - j);
    for (std::size_t p = p0; p < p1; p += kKC) {
      const std::size_t kc = std::min(kKC, p1 - p);
      for (std::size_t l = 0; l < nr; ++l) {
        const float* src = bt.data().data() + (j + l) * ldb + p;
        for (std::size_t k = 0; k < kc; ++k) buf[k * kNR + l] = src[k];
      }
      panel(a.data().data() + i0 * lda + p, lda, buf, kNR, c.data().data() + i0 * ldc + j, ldc,
            i1 - i0, nr, kc);
    }
  }
}

}  // namespace

const char* to_string(TransposeMode mode) noexcept {
  return mode == TransposeMode::NN ? "NN" : "NT";
}

void validate(const PartitionParams& params) {
  if (params.bm == 0 || params.bn == 0 || params.bk == 0) {
    throw std::invalid_argument("partition parameters must be >= 1 (bm=" +
                                std::to_string(params.bm) + ", bn=" + std::to_string(params.bn) +
                                ", bk=" + std::to_string(params.bk) + ")");
  }
}

GemmShape gemm_shape(const Matrix& a, const Matrix& b, TransposeMode mode) {
  const std::size_t b_inner = mode == TransposeMode::NN ? b.rows() : b.cols();
  const std::size_t b_outer = mode == TransposeMode::NN ? b.cols() : b.rows();
  if (a.cols() != b_inner) {
    throw std::invalid_argument(std::string("gemm ") + to_string(mode) +
                                ": inner dimensions disagree (a is " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + ", b is " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
  return {a.rows(), b_outer, a.cols()};
}

Matrix gemm_naive(const Matrix& a, const Matrix& b, TransposeMode mode) {
  const GemmShape s = gemm_shape(a, b, mode);
  Matrix c(s.m, s.n);
  for (std::size_t i = 0; i < s.m; ++i) {
    for (std::size_t j = 0; j < s.n; ++j) {
      float acc = 0.0f;
      if (mode == TransposeMode::NN) {
        for (std::size_t k = 0; k < s.k; ++k) acc += a(i, k) * b(k, j);
      } else {
        for (std::size_t k = 0; k < s.k; ++k) acc += a(i, k) * b(j, k);
      }
      c(i, j) = acc;
    }
  }
  return c;
}

BlockPlan make_plan(const GemmShape& shape, TransposeMode mode, const PartitionParams& params,
                    std::size_t threads) {
  validate(params);
  if (threads == 0) throw std::invalid_argument("gemm: threads must be >= 1");
  BlockPlan plan;
  plan.shape = shape;
  plan.mode = mode;
  plan.params = params;
  plan.m_blocks = (shape.m + params.bm - 1) / params.bm;
  plan.n_blocks = (shape.n + params.bn - 1) / params.bn;
  const std::size_t total = plan.m_blocks * plan.n_blocks;
  plan.worker_first.resize(threads + 1);
  for (std::size_t w = 0; w <= threads; ++w) plan.worker_first[w] = w * total / threads;
  return plan;
}

void run_blocks(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c,
                std::size_t first, std::size_t last) {
  const auto& [m, n, k] = plan.shape;
  const auto& p = plan.params;
  for (std::size_t p0 = 0; p0 < k; p0 += p.bk) {
    const std::size_t p1 = std::min(p0 + p.bk, k);
    for (std::size_t blk = first; blk < last; ++blk) {
      const std::size_t i0 = (blk / plan.n_blocks) * p.bm;
      const std::size_t j0 = (blk % plan.n_blocks) * p.bn;
      const std::size_t i1 = std::min(i0 + p.bm, m);
      const std::size_t j1 = std::min(j0 + p.bn, n);
      if (plan.mode == TransposeMode::NN)
        block_nn(a, b, c, i0, i1, j0, j1, p0, p1);
      else
        block_nt(a, b, c, i0, i1, j0, j1, p0, p1);
    }
  }
}

void execute_plan(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c) {
  if (plan.workers() == 1) {
    run_blocks(plan, a, b, c, 0, plan.worker_first.back());
    return;
  }
  shared_pool(plan.workers()).run([&](std::size_t w) {
    run_blocks(plan, a, b, c, plan.worker_first[w], plan.worker_first[w + 1]);
  });
}

Matrix gemm_blocked(const Matrix& a, const Matrix& b, TransposeMode mode,
                    const PartitionParams& params, std::size_t threads) {
  const GemmShape shape = gemm_shape(a, b, mode);
  const BlockPlan plan = make_plan(shape, mode, params, threads);
  Matrix c(shape.m, shape.n);
  execute_plan(plan, a, b, c);
  return c;
}

std::vector<Matrix> gemm_batched(std::span<const GemmTask> tasks, const PartitionParams& params,
                                 std::size_t threads) {
  validate(params);
  if (threads == 0) throw std::invalid_argument("gemm_batched: threads must be >= 1");
  std::vector<BlockPlan> plans;
  std::vector<Matrix> out;
  plans.reserve(tasks.size());
  out.reserve(tasks.size());
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    GemmShape shape;
    try {
      shape = gemm_shape(tasks[t].a, tasks[t].b, tasks[t].mode);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("gemm_batched: task " + std::to_string(t) + ": " + e.what());
    }
    plans.push_back(make_plan(shape, tasks[t].mode, params, 1));
    out.emplace_back(shape.m, shape.n);
  }
  if (tasks.empty()) return out;

  const std::size_t workers = std::min(threads, tasks.size());
  auto work = [&](std::size_t w) {
    for (std::size_t t = w * tasks.size() / workers; t < (w + 1) * tasks.size() / workers; ++t)
      run_blocks(plans[t], tasks[t].a, tasks[t].b, out[t], 0, plans[t].worker_first.back());
  };
  if (workers == 1)
    work(0);
  else
    shared_pool(workers).run(work);
  return out;
}

}  // namespace infer
