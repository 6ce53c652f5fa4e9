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

#include "nn/timing.hpp"

#include <chrono>
#include <numeric>

namespace infer {

std::string_view label(ModuleCat c) noexcept {
  constexpr std::array<std::string_view, kModuleCats> names = {
      "linear", "bmm", "softmax", "layernorm", "activation", "other"};
  return names[static_cast<std::size_t>(c)];
}

std::string_view label(SublayerCat c) noexcept {
  constexpr std::array<std::string_view, kSublayerCats> names = {
      "attention.self",     "attention.dense",  "attention.layernorm",
      "attention.other",    "feedforward.dense1", "feedforward.dense2",
      "feedforward.layernorm", "feedforward.other", "other"};
  return names[static_cast<std::size_t>(c)];
}

std::int64_t TimingBreakdown::module_sum() const noexcept {
  return std::accumulate(by_module.begin(), by_module.end(), std::int64_t{0});
}

std::int64_t TimingBreakdown::sublayer_sum() const noexcept {
  return std::accumulate(by_sublayer.begin(), by_sublayer.end(), std::int64_t{0});
}

TimingBreakdown& TimingBreakdown::operator+=(const TimingBreakdown& other) noexcept {
  for (std::size_t i = 0; i < kModuleCats; ++i) by_module[i] += other.by_module[i];
  for (std::size_t i = 0; i < kSublayerCats; ++i) by_sublayer[i] += other.by_sublayer[i];
  total += other.total;
  return *this;
}

std::int64_t steady_now_ns() noexcept {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Tracer::Tracer(TimingBreakdown* sink) noexcept : sink_(sink) {
  if (sink_) start_ = last_ = steady_now_ns();
}

void Tracer::lap(ModuleCat module, SublayerCat sublayer) noexcept {
  if (!sink_) return;
  const std::int64_t now = steady_now_ns();
  const std::int64_t dt = now - last_;
  sink_->by_module[static_cast<std::size_t>(module)] += dt;
  sink_->by_sublayer[static_cast<std::size_t>(sublayer)] += dt;
  last_ = now;
}

void Tracer::finish() noexcept {
  if (!sink_) return;
  sink_->total += steady_now_ns() - start_;
}

}  // namespace infer
