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
#include <string_view>

namespace infer {

struct EncoderConfig {
  std::size_t layers = 12;
  std::size_t heads = 12;
  std::size_t d_model = 768;
  std::size_t d_ff = 3072;
  std::size_t d_k = 64;
  std::size_t max_len = 512;
  float layernorm_eps = 1e-12f;
  std::size_t vocab = 1024;

  bool operator==(const EncoderConfig&) const = default;
};

inline constexpr std::uint64_t kDefaultSeed = 42;

/// Throws invalid_argument unless heads * d_k == d_model, max_len <= 512 and
/// every count is >= 1.
void validate(const EncoderConfig& cfg);

EncoderConfig bert_base();
EncoderConfig bert_large();
EncoderConfig distil();

/// "bert-base", "bert-large" or "distil".
EncoderConfig preset(std::string_view name);

struct ModelSpec {
  EncoderConfig config;
  std::uint64_t seed = kDefaultSeed;
};

/// Parses {layers, heads, d_model, d_ff, d_k, max_len, layernorm_eps, vocab,
/// seed}; missing keys take bert-base values.
ModelSpec parse_model_spec(std::string_view json_text);
ModelSpec load_model_spec(const std::string& path);

/// A preset name, or a path to a JSON file.
ModelSpec resolve_model_spec(const std::string& name_or_path);

}  // namespace infer
