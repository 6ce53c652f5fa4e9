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

#include "dispatch/dispatch.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace infer {
namespace {

constexpr std::size_t kMaxThreads = 1024;

std::atomic<std::uint64_t> g_next_id{1};

std::int64_t now_ns() noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

[[noreturn]] void fail(const std::string& check) {
  throw std::invalid_argument("dispatch: validation failed: " + check);
}

void validate_call(const KernelRegistry& reg, const KernelDescriptor& d, const Matrix& a,
                   const Matrix& b) {
  if (d.m == 0 || d.n == 0 || d.k == 0) fail("descriptor dimensions must be positive");
  if (d.threads == 0) fail("threads must be positive");
  if (d.threads > kMaxThreads) fail("threads exceeds " + std::to_string(kMaxThreads));
  if (d.params.bm == 0 || d.params.bn == 0 || d.params.bk == 0)
    fail("partition parameters must be positive");
  if (d.mode != TransposeMode::NN && d.mode != TransposeMode::NT) fail("unknown transpose mode");
  if (a.size() != a.rows() * a.cols()) fail("a storage does not match its shape");
  if (b.size() != b.rows() * b.cols()) fail("b storage does not match its shape");
  if (d.m != a.rows()) fail("descriptor m != a.rows");
  if (d.k != a.cols()) fail("descriptor k != a.cols");
  if (d.mode == TransposeMode::NN) {
    if (b.rows() != d.k) fail("NN: b.rows != k");
    if (b.cols() != d.n) fail("NN: b.cols != n");
  } else {
    if (b.cols() != d.k) fail("NT: b.cols != k");
    if (b.rows() != d.n) fail("NT: b.rows != n");
  }
  if (reg.caps().vector_bits == 0) fail("host capability probe missing");
}

void run_single(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c) {
  run_blocks(plan, a, b, c, 0, plan.worker_first.back());
}

void run_parallel(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c) {
  execute_plan(plan, a, b, c);
}

void run_naive(const BlockPlan& plan, const Matrix& a, const Matrix& b, Matrix& c) {
  c = gemm_naive(a, b, plan.mode);
}

// Last-hit memo for the fast path, packed into one cache line. Cache ids are
// never reused, so a stale entry can only miss. Descriptors with a field
// wider than 32 bits are not memoized.
struct alignas(64) FastMemo {
  std::uint64_t cache_id = 0;
  const Selection* selection = nullptr;
  std::array<std::uint32_t, 8> key{};
};

bool pack_key(const KernelDescriptor& d, std::array<std::uint32_t, 8>& key) noexcept {
  const std::size_t fields[8] = {static_cast<std::size_t>(d.mode), d.m, d.n, d.k, d.threads,
                                 d.params.bm, d.params.bn, d.params.bk};
  for (std::size_t i = 0; i < 8; ++i) {
    if (fields[i] > UINT32_MAX) return false;
    key[i] = static_cast<std::uint32_t>(fields[i]);
  }
  return true;
}

// initial-exec avoids a __tls_get_addr call per lookup in the PIC build.
__attribute__((tls_model("initial-exec"))) thread_local FastMemo t_memo;

Matrix run_selection(const Selection& sel, const Matrix& a, const Matrix& b) {
  Matrix c(sel.plan.shape.m, sel.plan.shape.n);
  sel.kernel->run(sel.plan, a, b, c);
  return c;
}

}  // namespace

CpuCaps probe_caps() {
  CpuCaps caps;
  caps.hw_threads = std::max(1u, std::thread::hardware_concurrency());
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx512f"))
    caps.vector_bits = 512;
  else if (__builtin_cpu_supports("avx2"))
    caps.vector_bits = 256;
#endif
  if (const char* env = std::getenv("INFER_VECTOR_BITS")) {
    const long bits = std::strtol(env, nullptr, 10);
    if (bits > 0) caps.vector_bits = static_cast<unsigned>(bits);
  }
  return caps;
}

std::size_t KernelDescriptorHash::operator()(const KernelDescriptor& d) const noexcept {
  std::size_t h = static_cast<std::size_t>(d.mode);
  for (std::size_t v : {d.m, d.n, d.k, d.threads, d.params.bm, d.params.bn, d.params.bk})
    h = (h ^ v) * 0x100000001b3ULL;
  return h;
}

KernelDescriptor describe(const Matrix& a, const Matrix& b, TransposeMode mode,
                          const PartitionParams& params, std::size_t threads) {
  const std::size_t n = mode == TransposeMode::NN ? b.cols() : b.rows();
  return {mode, a.rows(), n, a.cols(), threads, params};
}

KernelRegistry::KernelRegistry(CpuCaps caps, std::vector<KernelEntry> entries)
    : caps_(caps), entries_(std::move(entries)), id_(g_next_id++) {
  if (entries_.empty()) throw std::invalid_argument("kernel registry must not be empty");
}

const KernelEntry& KernelRegistry::select(const KernelDescriptor& d) const {
  for (const auto& e : entries_)
    if (e.accepts(d)) return e;
  throw std::logic_error("kernel registry has no fallback for descriptor");
}

std::unique_ptr<KernelRegistry> build_registry(const CpuCaps& caps) {
  std::vector<KernelEntry> entries;
  // Blocked kernels need at least 128-bit vectors for the register tile to
  // pay off.
  entries.push_back({kKernelSingleThread,
                     [caps](const KernelDescriptor& d) {
                       return d.threads == 1 && caps.vector_bits >= 128;
                     },
                     &run_single});
  entries.push_back({kKernelParallel,
                     [caps](const KernelDescriptor& d) {
                       return d.threads > 1 && caps.vector_bits >= 128;
                     },
                     &run_parallel});
  entries.push_back({kKernelFallback, [](const KernelDescriptor&) { return true; }, &run_naive});
  return std::make_unique<KernelRegistry>(caps, std::move(entries));
}

DispatchCache::DispatchCache(std::size_t capacity) : capacity_(capacity), id_(g_next_id++) {}

const Selection* DispatchCache::find(const KernelDescriptor& d) const {
  std::shared_lock lock(mutex_);
  auto it = map_.find(d);
  return it == map_.end() ? nullptr : &it->second;
}

const Selection* DispatchCache::insert(const KernelDescriptor& d, Selection selection,
                                       std::uint64_t registry_id) {
  std::unique_lock lock(mutex_);
  if (registry_id_ == 0) registry_id_ = registry_id;
  if (registry_id_ != registry_id)
    throw std::invalid_argument("dispatch cache is bound to a different kernel registry");
  if (auto it = map_.find(d); it != map_.end()) {
    // Lost a first-miss race; both sides selected the same kernel.
    it->second = std::move(selection);
    return &it->second;
  }
  if (map_.size() >= capacity_) {
    if (!saturated_.exchange(true)) {
      std::fprintf(stderr,
                   "infer: dispatch cache reached %zu entries; new shapes use the full path\n",
                   capacity_);
    }
    return nullptr;
  }
  return &map_.emplace(d, std::move(selection)).first->second;
}

std::size_t DispatchCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

std::vector<std::pair<KernelDescriptor, const KernelEntry*>> DispatchCache::snapshot() const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<KernelDescriptor, const KernelEntry*>> out;
  out.reserve(map_.size());
  for (const auto& [d, sel] : map_) out.emplace_back(d, sel.kernel);
  return out;
}

Selection select_full(const KernelRegistry& reg, const KernelDescriptor& d, const Matrix& a,
                      const Matrix& b) {
  validate_call(reg, d, a, b);
  const KernelEntry& kernel = reg.select(d);
  return {&kernel, make_plan({d.m, d.n, d.k}, d.mode, d.params, d.threads)};
}

Matrix dispatch_full(const KernelRegistry& reg, const KernelDescriptor& d, const Matrix& a,
                     const Matrix& b, DispatchProbe* probe) {
  if (probe) probe->enter = now_ns();
  Matrix c = [&] {
    const Selection sel = select_full(reg, d, a, b);
    if (probe) probe->kernel_begin = now_ns();
    Matrix out = run_selection(sel, a, b);
    if (probe) probe->kernel_end = now_ns();
    return out;
  }();
  if (probe) probe->exit = now_ns();
  return c;
}

Matrix dispatch_fast(DispatchCache& cache, const KernelRegistry& reg, const KernelDescriptor& d,
                     const Matrix& a, const Matrix& b, DispatchProbe* probe) {
  if (probe) probe->enter = now_ns();
  if (d.threads <= 1)
    throw std::invalid_argument("dispatch_fast requires threads > 1; use dispatch_full");

  std::array<std::uint32_t, 8> key;
  const bool packed = pack_key(d, key);
  const Selection* sel = nullptr;
  if (packed && t_memo.cache_id == cache.id() && t_memo.key == key) {
    sel = t_memo.selection;
  } else {
    if ((sel = cache.find(d)) == nullptr && !cache.saturated())
      sel = cache.insert(d, select_full(reg, d, a, b), reg.id());
    if (sel == nullptr) return dispatch_full(reg, d, a, b, probe);
    if (packed) {
      t_memo.cache_id = cache.id();
      t_memo.selection = sel;
      t_memo.key = key;
    }
  }

  if (probe) probe->kernel_begin = now_ns();
  Matrix c = run_selection(*sel, a, b);
  if (probe) {
    probe->kernel_end = now_ns();
    probe->exit = now_ns();
  }
  return c;
}

Matrix dispatch_direct(const Selection& sel, const Matrix& a, const Matrix& b,
                       DispatchProbe* probe) {
  if (probe) probe->enter = now_ns();
  if (probe) probe->kernel_begin = now_ns();
  Matrix c = run_selection(sel, a, b);
  if (probe) {
    probe->kernel_end = now_ns();
    probe->exit = now_ns();
  }
  return c;
}

Dispatcher::Dispatcher() : registry_(build_registry()) {}

Matrix Dispatcher::multiply(const Matrix& a, const Matrix& b, TransposeMode mode,
                            const PartitionParams& params, std::size_t threads) {
  const KernelDescriptor d = describe(a, b, mode, params, threads);
  if (threads <= 1) return dispatch_full(*registry_, d, a, b);
  return dispatch_fast(cache_, *registry_, d, a, b);
}

}  // namespace infer
