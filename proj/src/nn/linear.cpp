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

#include "nn/linear.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

#include "nn/timing.hpp"

namespace infer {
namespace {

std::int64_t median_of_timed(std::vector<std::int64_t> samples) {
  std::nth_element(samples.begin(), samples.begin() + samples.size() / 2, samples.end());
  return samples[samples.size() / 2];
}

}  // namespace

std::size_t bucket_index(std::size_t seq_len) {
  if (seq_len == 0) throw std::invalid_argument("bucket_index: sequence length must be >= 1");
  const std::size_t log2 = std::bit_width(seq_len) - 1;
  return std::min(log2, kFlagBuckets - 1);
}

std::int64_t SteadyProfileTimer::sample(const ProfileProbe&, const std::function<void()>& work) {
  const std::int64_t t0 = steady_now_ns();
  work();
  return steady_now_ns() - t0;
}

TransposeFlags ProfileCache::get_or_profile(const ProfileKey& key,
                                            const std::function<TransposeFlags()>& profile) {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard lock(mutex_);
    auto& s = slots_[key];
    if (!s) s = std::make_shared<Slot>();
    slot = s;
  }
  std::call_once(slot->once, [&] {
    slot->flags = profile();
    profiles_run_.fetch_add(1);
    std::lock_guard lock(mutex_);
    slot->ready = true;
  });
  return slot->flags;
}

std::optional<TransposeFlags> ProfileCache::find(const ProfileKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(key);
  if (it == slots_.end() || !it->second->ready) return std::nullopt;
  return it->second->flags;
}

std::size_t ProfileCache::size() const {
  std::lock_guard lock(mutex_);
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const auto& kv) { return kv.second->ready; }));
}

TransposeFlags profile_linear(std::size_t in_dim, std::size_t out_dim, std::size_t threads,
                              ProfileCache& cache, ProfileTimer& timer, Dispatcher& dispatcher,
                              const PartitionParams& params) {
  if (in_dim == 0 || out_dim == 0) throw std::invalid_argument("profile_linear: dims must be >= 1");
  if (threads == 0) throw std::invalid_argument("profile_linear: threads must be >= 1");

  return cache.get_or_profile({in_dim, out_dim, threads}, [&] {
    Rng rng(0x5eed0000ULL ^ (in_dim << 20) ^ out_dim);
    const Matrix w_normal = random_matrix(in_dim, out_dim, rng);
    const Matrix w_transposed = transpose(w_normal);

    TransposeFlags flags;
    for (std::size_t i = 0; i < kFlagBuckets; ++i) {
      const std::size_t rows = std::size_t{1} << i;
      const Matrix x = random_matrix(rows, in_dim, rng);
      std::int64_t median[2] = {0, 0};
      for (TransposeMode mode : {TransposeMode::NN, TransposeMode::NT}) {
        const Matrix& w = mode == TransposeMode::NN ? w_normal : w_transposed;
        const ProfileProbe probe{i, rows, in_dim, out_dim, threads, mode};
        const std::function<void()> work = [&] {
          Matrix y = dispatcher.multiply(x, w, mode, params, threads);
          (void)y;
        };
        std::vector<std::int64_t> timed;
        for (int r = 0; r < kProfileWarmup + kProfileTimed; ++r) {
          const std::int64_t t = timer.sample(probe, work);
          if (r >= kProfileWarmup) timed.push_back(t);
        }
        median[static_cast<int>(mode)] = median_of_timed(std::move(timed));
      }
      // Ties keep the transposed form.
      flags.entries[i] = median[1] <= median[0];
    }
    return flags;
  });
}

LinearLayer::LinearLayer(Matrix w_normal, std::vector<float> bias, TransposeFlags flags)
    : w_normal_(std::move(w_normal)),
      w_transposed_(transpose(w_normal_)),
      bias_(std::move(bias)),
      flags_(flags) {
  if (bias_.size() != w_normal_.cols()) {
    throw std::invalid_argument("linear: bias length " + std::to_string(bias_.size()) +
                                " != out_dim " + std::to_string(w_normal_.cols()));
  }
}

void add_bias_rows(Matrix& m, const std::vector<float>& bias) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += bias[j];
  }
}

Matrix linear_forward(const Matrix& x, const LinearLayer& layer, std::size_t threads,
                      const PartitionParams& params, Dispatcher& dispatcher) {
  if (x.cols() != layer.in_dim()) {
    throw std::invalid_argument("linear: input width " + std::to_string(x.cols()) +
                                " != in_dim " + std::to_string(layer.in_dim()));
  }
  const TransposeMode mode = layer.mode_for(x.rows());
  const Matrix& w = mode == TransposeMode::NN ? layer.w_normal() : layer.w_transposed();
  Matrix y = dispatcher.multiply(x, w, mode, params, threads);
  add_bias_rows(y, layer.bias());
  return y;
}

}  // namespace infer
