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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "core/tensor.hpp"
#include "gemm/gemm.hpp"

namespace infer {

/// One-time host probe folded into registry predicates.
struct CpuCaps {
  std::size_t hw_threads = 1;
  unsigned vector_bits = 128;
};

/// hardware_concurrency plus the widest usable vector unit. INFER_VECTOR_BITS
/// overrides the detected width.
CpuCaps probe_caps();

struct KernelDescriptor {
  TransposeMode mode = TransposeMode::NN;
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t k = 1;
  std::size_t threads = 1;
  PartitionParams params;

  bool operator==(const KernelDescriptor&) const = default;
};

struct KernelDescriptorHash {
  std::size_t operator()(const KernelDescriptor& d) const noexcept;
};

KernelDescriptor describe(const Matrix& a, const Matrix& b, TransposeMode mode,
                          const PartitionParams& params, std::size_t threads);

using KernelFn = void (*)(const BlockPlan&, const Matrix&, const Matrix&, Matrix&);

struct KernelEntry {
  std::string name;
  std::function<bool(const KernelDescriptor&)> accepts;
  KernelFn run = nullptr;
};

/// What a dispatch decides for one descriptor: the kernel and its schedule.
struct Selection {
  const KernelEntry* kernel = nullptr;
  BlockPlan plan;
};

/// Ordered list of kernels; the first whose predicate accepts wins. The last
/// entry accepts every valid descriptor.
class KernelRegistry {
 public:
  KernelRegistry(CpuCaps caps, std::vector<KernelEntry> entries);

  KernelRegistry(const KernelRegistry&) = delete;
  KernelRegistry& operator=(const KernelRegistry&) = delete;

  const KernelEntry& select(const KernelDescriptor& d) const;

  const std::vector<KernelEntry>& entries() const noexcept { return entries_; }
  const CpuCaps& caps() const noexcept { return caps_; }
  std::uint64_t id() const noexcept { return id_; }

 private:
  CpuCaps caps_;
  std::vector<KernelEntry> entries_;
  std::uint64_t id_;
};

inline constexpr const char* kKernelSingleThread = "gemm_blocked_st";
inline constexpr const char* kKernelParallel = "gemm_blocked_mt";
inline constexpr const char* kKernelFallback = "gemm_naive";

/// Single-thread blocked kernel, parallel blocked kernel, naive fallback,
/// in that order.
std::unique_ptr<KernelRegistry> build_registry(const CpuCaps& caps = probe_caps());

/// Descriptor -> selection memo. Readers share a lock; inserts are
/// serialized. Never evicts; once `capacity` entries exist further misses
/// are not cached.
class DispatchCache {
 public:
  explicit DispatchCache(std::size_t capacity = 1024);

  DispatchCache(const DispatchCache&) = delete;
  DispatchCache& operator=(const DispatchCache&) = delete;

  const Selection* find(const KernelDescriptor& d) const;
  /// Returns the stored selection, or nullptr when the cache is full.
  const Selection* insert(const KernelDescriptor& d, Selection selection, std::uint64_t registry_id);

  std::size_t size() const;
  std::size_t capacity() const noexcept { return capacity_; }
  bool saturated() const noexcept { return saturated_.load(std::memory_order_relaxed); }
  std::uint64_t id() const noexcept { return id_; }

  std::vector<std::pair<KernelDescriptor, const KernelEntry*>> snapshot() const;

 private:
  std::size_t capacity_;
  std::uint64_t id_;
  std::uint64_t registry_id_ = 0;
  mutable std::shared_mutex mutex_;
  std::unordered_map<KernelDescriptor, Selection, KernelDescriptorHash> map_;
  std::atomic<bool> saturated_{false};
};

/// Steady-clock timestamps (ns) at the phase boundaries of one dispatch.
struct DispatchProbe {
  std::int64_t enter = 0;
  std::int64_t kernel_begin = 0;
  std::int64_t kernel_end = 0;
  std::int64_t exit = 0;

  /// Raw time outside the kernel body, timer reads included.
  std::int64_t dispatch_ns() const noexcept {
    return (kernel_begin - enter) + (exit - kernel_end);
  }
  /// dispatch_ns() minus a measurement floor, clamped at 0.
  std::int64_t dispatch_net_ns(std::int64_t floor_ns) const noexcept {
    const std::int64_t net = dispatch_ns() - floor_ns;
    return net > 0 ? net : 0;
  }
  std::int64_t kernel_ns() const noexcept { return kernel_end - kernel_begin; }
};

/// Runs an already selected kernel with the probe stamps in the same places
/// as the dispatch paths but no dispatch work between them. Its dispatch_ns()
/// is the floor that the timestamps alone cost.
Matrix dispatch_direct(const Selection& sel, const Matrix& a, const Matrix& b,
                       DispatchProbe* probe);

/// Validation, registry scan and scheduling, without running anything.
Selection select_full(const KernelRegistry& reg, const KernelDescriptor& d, const Matrix& a,
                      const Matrix& b);

/// Validates every argument, scans the registry and runs the first
/// compatible kernel. Performs all of it on every call.
Matrix dispatch_full(const KernelRegistry& reg, const KernelDescriptor& d, const Matrix& a,
                     const Matrix& b, DispatchProbe* probe = nullptr);

/// Multi-threaded calls only. A hit runs the memoized kernel and schedule
/// with no validation and no scan; a miss goes through dispatch_full and
/// records the selection.
Matrix dispatch_fast(DispatchCache& cache, const KernelRegistry& reg, const KernelDescriptor& d,
                     const Matrix& a, const Matrix& b, DispatchProbe* probe = nullptr);

/// Registry plus cache; routes threads == 1 to the full path and everything
/// else to the fast path.
class Dispatcher {
 public:
  Dispatcher();

  Matrix multiply(const Matrix& a, const Matrix& b, TransposeMode mode,
                  const PartitionParams& params, std::size_t threads);

  const KernelRegistry& registry() const noexcept { return *registry_; }
  DispatchCache& cache() noexcept { return cache_; }

 private:
  std::unique_ptr<KernelRegistry> registry_;
  DispatchCache cache_;
};

}  // namespace infer
