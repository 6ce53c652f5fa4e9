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

#include "bench/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "bench/stats.hpp"
#include "dispatch/dispatch.hpp"

namespace infer {
namespace {

std::string partition_label(const PartitionParams& p) {
  return std::to_string(p.bm) + "/" + std::to_string(p.bn) + "/" + std::to_string(p.bk);
}

double checksum(const Matrix& m) {
  double s = 0.0;
  for (float v : m.data()) s += v;
  return s;
}

std::int64_t as_i64(std::size_t v) { return static_cast<std::int64_t>(v); }

std::vector<double> timed_samples(ProfileTimer& timer, const ProfileProbe& probe,
                                  const std::function<void()>& work, std::size_t reps) {
  timer.sample(probe, work);  // warm-up
  std::vector<double> out;
  out.reserve(reps);
  for (std::size_t r = 0; r < reps; ++r) out.push_back(static_cast<double>(timer.sample(probe, work)));
  return out;
}

}  // namespace

BenchResult bench_model(const Model& model, std::size_t seq_len, std::size_t threads,
                        std::size_t reps, const PartitionParams& params, std::uint64_t token_seed) {
  if (seq_len == 0 || seq_len > 512)
    throw std::invalid_argument("bench_model: sequence length must be in [1, 512]");
  if (reps == 0) throw std::invalid_argument("bench_model: reps must be >= 1");

  const auto tokens = synthetic_tokens(seq_len, model.config().vocab, token_seed);
  BenchResult res;
  res.config = model.config();
  res.seq_len = seq_len;
  res.threads = threads;
  res.params = params;

  ForwardResult warm = model_forward(model, tokens, threads, params);
  res.pooled = warm.pooled;
  for (std::size_t r = 0; r < reps; ++r) {
    const std::int64_t t0 = steady_now_ns();
    ForwardResult fr = model_forward(model, tokens, threads, params);
    const std::int64_t t1 = steady_now_ns();
    res.latencies_ms.push_back(static_cast<double>(t1 - t0) * 1e-6);
    res.breakdown += fr.timing;
    if (!(fr.pooled == res.pooled)) res.pooled_stable = false;
  }
  res.mean_ms = mean(res.latencies_ms);
  res.std_ms = stddev(res.latencies_ms);
  res.median_ms = median(res.latencies_ms);
  res.pooled_checksum = checksum(res.pooled);
  return res;
}

std::vector<BenchResult> bench_model_grid(const BenchModelOptions& opts, ProfileTimer* timer) {
  validate(opts.spec.config);
  validate(opts.params);
  for (std::size_t len : opts.seq_lens)
    if (len == 0 || len > opts.spec.config.max_len)
      throw std::invalid_argument("bench-model: sequence length " + std::to_string(len) +
                                  " outside [1, max_len]");
  for (std::size_t t : opts.threads)
    if (t == 0) throw std::invalid_argument("bench-model: threads must be >= 1");

  std::vector<BenchResult> out;
  ProfileCache cache;
  for (std::size_t threads : opts.threads) {
    const Model model =
        build_model(opts.spec.config, opts.spec.seed, threads, cache, opts.adaptive, timer, opts.params);
    for (std::size_t len : opts.seq_lens) {
      BenchResult r = bench_model(model, len, threads, opts.reps, opts.params, opts.spec.seed + len);
      r.cfg_name = opts.cfg_name;
      r.adaptive = opts.adaptive;
      out.push_back(std::move(r));
    }
  }
  return out;
}

CsvTable bench_model_table(const std::vector<BenchResult>& results) {
  CsvTable t;
  t.header = {"cfg",    "seq_len",   "threads",         "partition",     "adaptive",
              "reps",   "mean_ms",   "std_ms",          "median_ms",     "pooled_checksum",
              "pooled_stable", "total_ns"};
  for (std::size_t c = 0; c < kModuleCats; ++c)
    t.header.push_back("module." + std::string(label(static_cast<ModuleCat>(c))) + "_ns");
  for (std::size_t c = 0; c < kSublayerCats; ++c)
    t.header.push_back("sublayer." + std::string(label(static_cast<SublayerCat>(c))) + "_ns");

  for (const auto& r : results) {
    const auto reps = static_cast<double>(std::max<std::size_t>(r.latencies_ms.size(), 1));
    std::vector<CsvCell> row = {r.cfg_name,
                                as_i64(r.seq_len),
                                as_i64(r.threads),
                                partition_label(r.params),
                                std::string(r.adaptive ? "on" : "off"),
                                as_i64(r.latencies_ms.size()),
                                r.mean_ms,
                                r.std_ms,
                                r.median_ms,
                                r.pooled_checksum,
                                std::int64_t{r.pooled_stable ? 1 : 0},
                                static_cast<double>(r.breakdown.total) / reps};
    for (auto v : r.breakdown.by_module) row.emplace_back(static_cast<double>(v) / reps);
    for (auto v : r.breakdown.by_sublayer) row.emplace_back(static_cast<double>(v) / reps);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<LinearShape> linear_shapes(const EncoderConfig& cfg) {
  return {{cfg.d_model, cfg.d_model}, {cfg.d_model, cfg.d_ff}, {cfg.d_ff, cfg.d_model}};
}

CsvTable bench_matmul_ratio(const MatmulRatioOptions& opts, ProfileTimer* timer) {
  if (opts.reps == 0) throw std::invalid_argument("bench-matmul: reps must be >= 1");
  validate(opts.params);
  SteadyProfileTimer steady;
  ProfileTimer& clock = timer ? *timer : steady;
  Dispatcher dispatcher;

  CsvTable t;
  t.header = {"in_dim",        "out_dim",       "seq_len",         "threads", "reps",
              "nn_median_ns",  "nt_median_ns",  "ratio_nn_over_nt"};
  Rng rng(opts.seed);
  for (const auto& shape : opts.shapes) {
    const Matrix w = random_matrix(shape.in_dim, shape.out_dim, rng);
    const Matrix wt = transpose(w);
    for (std::size_t len : opts.seq_lens) {
      const Matrix x = random_matrix(len, shape.in_dim, rng);
      for (std::size_t threads : opts.threads) {
        if (threads == 0) throw std::invalid_argument("bench-matmul: threads must be >= 1");
        double med[2];
        for (TransposeMode mode : {TransposeMode::NN, TransposeMode::NT}) {
          const Matrix& b = mode == TransposeMode::NN ? w : wt;
          const ProfileProbe probe{bucket_index(len), len, shape.in_dim, shape.out_dim, threads, mode};
          const std::function<void()> work = [&] {
            Matrix y = dispatcher.multiply(x, b, mode, opts.params, threads);
            (void)y;
          };
          const auto samples = timed_samples(clock, probe, work, opts.reps);
          med[static_cast<int>(mode)] = median(samples);
        }
        t.rows.push_back({as_i64(shape.in_dim), as_i64(shape.out_dim), as_i64(len),
                          as_i64(threads), as_i64(opts.reps), med[0], med[1],
                          med[1] > 0.0 ? med[0] / med[1] : 0.0});
      }
    }
  }
  return t;
}

std::vector<DispatchOverheadRow> bench_dispatch_overhead(const DispatchOverheadOptions& opts) {
  if (opts.reps < 1000) throw std::invalid_argument("bench-dispatch: reps must be >= 1000");
  if (opts.threads == 0) throw std::invalid_argument("bench-dispatch: threads must be >= 1");
  if (opts.fast && opts.threads < 2)
    throw std::invalid_argument("bench-dispatch: the fast path needs threads >= 2");
  if (!opts.full && !opts.fast) throw std::invalid_argument("bench-dispatch: no path selected");
  validate(opts.params);

  auto registry = build_registry();
  DispatchCache cache;
  Rng rng(opts.seed);
  std::vector<DispatchOverheadRow> rows;

  for (const auto& shape : opts.shapes) {
    const Matrix a = random_matrix(shape.m, shape.k, rng);
    const Matrix b = random_matrix(shape.k, shape.n, rng);
    const KernelDescriptor d{TransposeMode::NN, shape.m, shape.n, shape.k, opts.threads, opts.params};
    const Selection preselected = select_full(*registry, d, a, b);

    struct Samples {
      std::vector<std::int64_t> raw;
      std::vector<double> kernel;
      void add(const DispatchProbe& p) {
        raw.push_back(p.dispatch_ns());
        kernel.push_back(static_cast<double>(p.kernel_ns()));
      }
    } full, fast, direct;
    bool equal = true;
    const Matrix reference = dispatch_full(*registry, d, a, b);
    if (opts.fast) (void)dispatch_fast(cache, *registry, d, a, b);  // populate
    for (std::size_t r = 0; r < opts.reps; ++r) {
      DispatchProbe probe;
      if (opts.full) {
        (void)dispatch_full(*registry, d, a, b, &probe);
        full.add(probe);
      }
      if (opts.fast) {
        const Matrix c = dispatch_fast(cache, *registry, d, a, b, &probe);
        fast.add(probe);
        if (!(c == reference)) equal = false;
      }
      (void)dispatch_direct(preselected, a, b, &probe);
      direct.add(probe);
    }

    std::vector<double> direct_raw(direct.raw.begin(), direct.raw.end());
    const auto floor_ns = static_cast<std::int64_t>(median(direct_raw));
    auto push = [&](const char* path, const Samples& s) {
      std::vector<double> net, raw;
      for (std::int64_t v : s.raw) {
        raw.push_back(static_cast<double>(v));
        net.push_back(static_cast<double>(std::max<std::int64_t>(v - floor_ns, 0)));
      }
      rows.push_back({path, shape, opts.threads, opts.reps, median(net), median(raw),
                      static_cast<double>(floor_ns), median(s.kernel), mean(net), mean(s.kernel),
                      equal});
    };
    if (opts.full) push("full", full);
    if (opts.fast) push("fast", fast);
  }
  return rows;
}

CsvTable dispatch_overhead_table(const std::vector<DispatchOverheadRow>& rows) {
  CsvTable t;
  t.header = {"path",
              "m",
              "k",
              "n",
              "threads",
              "reps",
              "dispatch_median_ns",
              "dispatch_raw_median_ns",
              "probe_floor_ns",
              "kernel_median_ns",
              "dispatch_mean_ns",
              "kernel_mean_ns",
              "dispatch_share",
              "bitwise_equal"};
  for (const auto& r : rows) {
    const double share = r.dispatch_median_ns / (r.dispatch_median_ns + r.kernel_median_ns);
    t.rows.push_back({r.path, as_i64(r.shape.m), as_i64(r.shape.k), as_i64(r.shape.n),
                      as_i64(r.threads), as_i64(r.reps), r.dispatch_median_ns,
                      r.dispatch_raw_median_ns, r.probe_floor_ns, r.kernel_median_ns,
                      r.dispatch_mean_ns, r.kernel_mean_ns, share,
                      std::int64_t{r.bitwise_equal ? 1 : 0}});
  }
  return t;
}

std::vector<SweepShape> sweep_shapes(const EncoderConfig& cfg, std::size_t seq_len) {
  std::vector<SweepShape> out;
  for (const auto& s : linear_shapes(cfg)) out.push_back({seq_len, s.in_dim, s.out_dim});
  return out;
}

CsvTable sweep_partition(const SweepOptions& opts) {
  if (opts.reps == 0) throw std::invalid_argument("sweep-partition: reps must be >= 1");
  for (std::size_t bk : opts.bk_values)
    if (bk == 0) throw std::invalid_argument("sweep-partition: bk values must be >= 1");
  if (opts.bm == 0 || opts.bn == 0) throw std::invalid_argument("sweep-partition: bm, bn must be >= 1");

  CsvTable t;
  t.header = {"cfg", "mode", "m",      "k",          "n",           "bm",  "bn",
              "bk",  "threads", "reps", "median_ns", "gflops", "max_rel_err", "pass"};
  Rng rng(opts.seed);
  SteadyProfileTimer clock;
  for (const auto& s : opts.shapes) {
    const Matrix a = random_matrix(s.m, s.k, rng);
    const Matrix b = random_matrix(s.k, s.n, rng);
    const Matrix bt = transpose(b);
    for (TransposeMode mode : opts.modes) {
      const Matrix& rhs = mode == TransposeMode::NN ? b : bt;
      const Matrix oracle = gemm_naive(a, rhs, mode);
      for (std::size_t bk : opts.bk_values) {
        const PartitionParams params{opts.bm, opts.bn, bk};
        for (std::size_t threads : opts.threads) {
          if (threads == 0) throw std::invalid_argument("sweep-partition: threads must be >= 1");
          Matrix c(1, 1);
          const std::function<void()> work = [&] { c = gemm_blocked(a, rhs, mode, params, threads); };
          const auto samples = timed_samples(clock, {}, work, opts.reps);
          const double med = median(samples);
          const double err = max_rel_err(c, oracle);
          const double flops = 2.0 * static_cast<double>(s.m * s.k * s.n);
          t.rows.push_back({opts.cfg_name, std::string(to_string(mode)), as_i64(s.m), as_i64(s.k),
                            as_i64(s.n), as_i64(opts.bm), as_i64(opts.bn), as_i64(bk),
                            as_i64(threads), as_i64(opts.reps), med,
                            med > 0.0 ? flops / med : 0.0, err,
                            std::int64_t{err <= kSweepTolerance ? 1 : 0}});
        }
      }
    }
  }
  return t;
}

PartitionParams parse_partition(const std::string& text) {
  if (text == "baseline") return PartitionParams::baseline();
  if (text == "patched") return PartitionParams::patched();
  std::size_t vals[3];
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, vals[i]);
    if (ec != std::errc() || (i < 2 && (next == end || *next != ',')) || (i == 2 && next != end))
      throw std::invalid_argument("partition must be 'baseline', 'patched' or 'bm,bn,bk', got '" +
                                  text + "'");
    p = next + 1;
  }
  PartitionParams params{vals[0], vals[1], vals[2]};
  validate(params);
  return params;
}

}  // namespace infer
