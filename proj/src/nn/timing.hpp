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
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace infer {

enum class ModuleCat : std::size_t { Linear, Bmm, Softmax, LayerNorm, Activation, Other, kCount };

enum class SublayerCat : std::size_t {
  AttnSelf,
  AttnDense,
  AttnLayerNorm,
  AttnOther,
  FfnDense1,
  FfnDense2,
  FfnLayerNorm,
  FfnOther,
  Other,
  kCount
};

inline constexpr std::size_t kModuleCats = static_cast<std::size_t>(ModuleCat::kCount);
inline constexpr std::size_t kSublayerCats = static_cast<std::size_t>(SublayerCat::kCount);

std::string_view label(ModuleCat c) noexcept;
std::string_view label(SublayerCat c) noexcept;

/// Nanoseconds per category, kept in two views over the same wall time:
/// by module (linear, bmm, ...) and by sub-layer (attention.self, ...).
struct TimingBreakdown {
  std::array<std::int64_t, kModuleCats> by_module{};
  std::array<std::int64_t, kSublayerCats> by_sublayer{};
  std::int64_t total = 0;

  std::int64_t module_ns(ModuleCat c) const noexcept {
    return by_module[static_cast<std::size_t>(c)];
  }
  std::int64_t sublayer_ns(SublayerCat c) const noexcept {
    return by_sublayer[static_cast<std::size_t>(c)];
  }
  std::int64_t module_sum() const noexcept;
  std::int64_t sublayer_sum() const noexcept;

  TimingBreakdown& operator+=(const TimingBreakdown& other) noexcept;
};

std::int64_t steady_now_ns() noexcept;

/// Lap timer: each lap() charges the time since the previous lap to one
/// module and one sub-layer category, so the categories tile the traced
/// interval with no gaps or overlap.
class Tracer {
 public:
  explicit Tracer(TimingBreakdown* sink) noexcept;

  void lap(ModuleCat module, SublayerCat sublayer) noexcept;
  /// Adds the wall time since construction to sink->total. Time after the
  /// last lap stays uncategorized.
  void finish() noexcept;

 private:
  TimingBreakdown* sink_;
  std::int64_t start_ = 0;
  std::int64_t last_ = 0;
};

}  // namespace infer
