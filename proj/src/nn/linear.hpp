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

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "core/tensor.hpp"
#include "dispatch/dispatch.hpp"
#include "gemm/gemm.hpp"

namespace infer {

inline constexpr std::size_t kFlagBuckets = 10;

/// min(floor(log2(seq_len)), 9).
std::size_t bucket_index(std::size_t seq_len);

/// Entry i selects the transposed weight (NT) for sequence lengths in
/// [2^i, 2^(i+1)); bucket 9 also covers everything above 512.
struct TransposeFlags {
  std::array<bool, kFlagBuckets> entries{};

  static TransposeFlags all(bool value) noexcept {
    TransposeFlags f;
    f.entries.fill(value);
    return f;
  }
  bool operator[](std::size_t i) const noexcept { return entries[i]; }
  bool operator==(const TransposeFlags&) const = default;
};

struct ProfileProbe {
  std::size_t bucket = 0;
  std::size_t rows = 0;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t threads = 1;
  TransposeMode mode = TransposeMode::NN;
};

/// Timing source for profiling. A real timer runs `work` and reports its
/// duration; a synthetic one may report any cost without running it.
class ProfileTimer {
 public:
  virtual ~ProfileTimer() = default;
  virtual std::int64_t sample(const ProfileProbe& probe, const std::function<void()>& work) = 0;
};

class SteadyProfileTimer final : public ProfileTimer {
 public:
  std::int64_t sample(const ProfileProbe& probe, const std::function<void()>& work) override;
};

/// Profiling protocol: per bucket and form, 2 warm-up samples are discarded
/// and the median of the next 5 is kept.
inline constexpr int kProfileWarmup = 2;
inline constexpr int kProfileTimed = 5;

struct ProfileKey {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::size_t threads = 1;

  auto operator<=>(const ProfileKey&) const = default;
};

/// Flags shared by every linear layer with the same (in, out, threads).
/// Each key is profiled at most once, even under concurrent first use.
class ProfileCache {
 public:
  TransposeFlags get_or_profile(const ProfileKey& key,
                                const std::function<TransposeFlags()>& profile);
  std::optional<TransposeFlags> find(const ProfileKey& key) const;

  std::size_t size() const;
  std::size_t profiles_run() const noexcept { return profiles_run_.load(); }

 private:
  struct Slot {
    std::once_flag once;
    TransposeFlags flags;
    bool ready = false;
  };
  mutable std::mutex mutex_;
  std::map<ProfileKey, std::shared_ptr<Slot>> slots_;
  std::atomic<std::size_t> profiles_run_{0};
};

/// Flags for a linear layer of shape [in_dim -> out_dim], measured on random
/// data through the dispatcher unless the cache already holds them.
/// entries[i] is true when the NT median is not slower than the NN median.
TransposeFlags profile_linear(std::size_t in_dim, std::size_t out_dim, std::size_t threads,
                              ProfileCache& cache, ProfileTimer& timer, Dispatcher& dispatcher,
                              const PartitionParams& params = PartitionParams::baseline());

/// Weights kept in both layouts: w_normal [in x out] for NN and
/// w_transposed [out x in] for NT.
class LinearLayer {
 public:
  LinearLayer(Matrix w_normal, std::vector<float> bias,
              TransposeFlags flags = TransposeFlags::all(true));

  std::size_t in_dim() const noexcept { return w_normal_.rows(); }
  std::size_t out_dim() const noexcept { return w_normal_.cols(); }
  const Matrix& w_normal() const noexcept { return w_normal_; }
  const Matrix& w_transposed() const noexcept { return w_transposed_; }
  const std::vector<float>& bias() const noexcept { return bias_; }
  const TransposeFlags& flags() const noexcept { return flags_; }
  void set_flags(const TransposeFlags& flags) noexcept { flags_ = flags; }

  TransposeMode mode_for(std::size_t seq_len) const {
    return flags_[bucket_index(seq_len)] ? TransposeMode::NT : TransposeMode::NN;
  }

 private:
  Matrix w_normal_;
  Matrix w_transposed_;
  std::vector<float> bias_;
  TransposeFlags flags_;
};

/// x * W + bias with the weight form chosen by flags[bucket_index(rows)].
Matrix linear_forward(const Matrix& x, const LinearLayer& layer, std::size_t threads,
                      const PartitionParams& params, Dispatcher& dispatcher);

void add_bias_rows(Matrix& m, const std::vector<float>& bias);

}  // namespace infer
