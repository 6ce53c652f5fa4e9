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
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bench/csv.hpp"
#include "gemm/gemm.hpp"
#include "nn/config.hpp"
#include "nn/encoder.hpp"
#include "nn/linear.hpp"
#include "nn/timing.hpp"

namespace infer {

// ---------------------------------------------------------------------------
// Model latency

struct BenchResult {
  std::string cfg_name;
  EncoderConfig config;
  std::size_t seq_len = 0;
  std::size_t threads = 1;
  PartitionParams params;
  bool adaptive = true;
  std::vector<double> latencies_ms;  // warm repetitions only
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double median_ms = 0.0;
  TimingBreakdown breakdown;  // summed over the warm repetitions
  Matrix pooled{1, 1};
  double pooled_checksum = 0.0;
  bool pooled_stable = true;  // every repetition produced the same bits
};

/// Runs one discarded warm-up forward and `reps` timed forwards.
BenchResult bench_model(const Model& model, std::size_t seq_len, std::size_t threads,
                        std::size_t reps, const PartitionParams& params, std::uint64_t token_seed);

struct BenchModelOptions {
  std::string cfg_name = "bert-base";
  ModelSpec spec;
  std::vector<std::size_t> seq_lens{8, 64, 384};
  std::vector<std::size_t> threads{1};
  std::size_t reps = 5;
  PartitionParams params = PartitionParams::baseline();
  bool adaptive = true;
};

/// Builds one model per thread count (profiling outside the timed region)
/// and benches every sequence length.
std::vector<BenchResult> bench_model_grid(const BenchModelOptions& opts,
                                          ProfileTimer* timer = nullptr);

CsvTable bench_model_table(const std::vector<BenchResult>& results);

// ---------------------------------------------------------------------------
// NN vs NT matmul ratio

struct LinearShape {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
};

std::vector<LinearShape> linear_shapes(const EncoderConfig& cfg);

struct MatmulRatioOptions {
  std::vector<LinearShape> shapes{{768, 768}, {768, 3072}, {3072, 768}};
  std::vector<std::size_t> seq_lens{1, 2, 4, 8, 16, 32, 64, 128, 256, 512};
  std::vector<std::size_t> threads{1};
  std::size_t reps = 5;
  PartitionParams params = PartitionParams::baseline();
  std::uint64_t seed = kDefaultSeed;
};

/// One row per (shape, seq_len, threads): median NN and NT times and their
/// ratio NN / NT (> 1 means the transposed form is faster).
CsvTable bench_matmul_ratio(const MatmulRatioOptions& opts, ProfileTimer* timer = nullptr);

// ---------------------------------------------------------------------------
// Dispatcher overhead

struct DispatchShape {
  std::size_t m = 8;
  std::size_t k = 768;
  std::size_t n = 768;
};

struct DispatchOverheadOptions {
  std::vector<DispatchShape> shapes{{8, 768, 768}};
  std::size_t threads = 2;
  std::size_t reps = 10000;
  PartitionParams params = PartitionParams::baseline();
  bool full = true;
  bool fast = true;
  std::uint64_t seed = kDefaultSeed;
};

struct DispatchOverheadRow {
  std::string path;
  DispatchShape shape;
  std::size_t threads = 0;
  std::size_t reps = 0;
  double dispatch_median_ns = 0.0;  // raw minus probe_floor_ns
  double dispatch_raw_median_ns = 0.0;
  double probe_floor_ns = 0.0;  // median raw dispatch time of a direct kernel call
  double kernel_median_ns = 0.0;
  double dispatch_mean_ns = 0.0;
  double kernel_mean_ns = 0.0;
  bool bitwise_equal = true;  // fast path output matched the full path
};

/// Alternates full-path and fast-path calls on the same operands and records
/// the phase split of each. Every repetition also makes a direct kernel call
/// with the same probe placement; its median is the floor subtracted from the
/// dispatch times (raw values are kept too). Requires reps >= 1000 and, for the fast path,
/// threads >= 2.
std::vector<DispatchOverheadRow> bench_dispatch_overhead(const DispatchOverheadOptions& opts);

CsvTable dispatch_overhead_table(const std::vector<DispatchOverheadRow>& rows);

// ---------------------------------------------------------------------------
// Partition sweep

struct SweepShape {
  std::size_t m = 0;
  std::size_t k = 0;
  std::size_t n = 0;
};

/// The three linear-layer products of `cfg` at sequence length `seq_len`.
std::vector<SweepShape> sweep_shapes(const EncoderConfig& cfg, std::size_t seq_len);

struct SweepOptions {
  std::string cfg_name = "bert-base";
  std::vector<std::size_t> bk_values{64, 384};
  std::vector<SweepShape> shapes;
  std::vector<TransposeMode> modes{TransposeMode::NN, TransposeMode::NT};
  std::vector<std::size_t> threads{1};
  std::size_t reps = 3;
  std::size_t bm = 64;
  std::size_t bn = 64;
  std::uint64_t seed = kDefaultSeed;
};

inline constexpr double kSweepTolerance = 1e-4;

/// Times gemm_blocked for each (bk, shape, mode, threads) and checks it
/// against gemm_naive. The `pass` column is 1 when max_rel_err <= 1e-4.
CsvTable sweep_partition(const SweepOptions& opts);

/// "baseline", "patched" or "bm,bn,bk".
PartitionParams parse_partition(const std::string& text);

}  // namespace infer
