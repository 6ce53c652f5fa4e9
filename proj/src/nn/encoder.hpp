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
#include <memory>
#include <span>
#include <vector>

#include "core/tensor.hpp"
#include "dispatch/dispatch.hpp"
#include "nn/config.hpp"
#include "nn/linear.hpp"
#include "nn/ops.hpp"
#include "nn/timing.hpp"

namespace infer {

struct AttentionWeights {
  LinearLayer wq;
  LinearLayer wk;
  LinearLayer wv;
  LinearLayer wo;
};

struct FfnWeights {
  LinearLayer w1;
  LinearLayer w2;
};

struct EncoderLayerWeights {
  AttentionWeights attention;
  LayerNormParams attention_norm;
  FfnWeights ffn;
  LayerNormParams ffn_norm;
};

/// Execution knobs shared by every sub-layer call.
struct ExecContext {
  std::size_t threads = 1;
  PartitionParams params = PartitionParams::baseline();
  Dispatcher* dispatcher = nullptr;
  Tracer* tracer = nullptr;

  void lap(ModuleCat m, SublayerCat s) const noexcept {
    if (tracer) tracer->lap(m, s);
  }
};

/// Multi-head attention: projections, per-head softmax(Q K^T / sqrt(d_k)) V
/// as two batched multiplies, concatenation, output projection.
Matrix self_attention(const Matrix& x, const AttentionWeights& w, const EncoderConfig& cfg,
                      const ExecContext& ctx);

/// w2(gelu(w1(x))).
Matrix feed_forward(const Matrix& x, const FfnWeights& w, const ExecContext& ctx);

/// Post-norm: y1 = LN(x + attn(x)); y2 = LN(y1 + ffn(y1)).
Matrix encoder_layer(const Matrix& x, const EncoderLayerWeights& w, const EncoderConfig& cfg,
                     const ExecContext& ctx);

class Model {
 public:
  Model(EncoderConfig config, Matrix embedding, std::vector<EncoderLayerWeights> layers,
        LinearLayer pooler);

  const EncoderConfig& config() const noexcept { return config_; }
  const Matrix& embedding() const noexcept { return embedding_; }
  const std::vector<EncoderLayerWeights>& layers() const noexcept { return layers_; }
  const LinearLayer& pooler() const noexcept { return pooler_; }
  Dispatcher& dispatcher() const noexcept { return *dispatcher_; }

  /// Every linear layer in forward order, pooler last.
  std::vector<const LinearLayer*> linear_layers() const;

 private:
  friend Model build_model(const EncoderConfig&, std::uint64_t, std::size_t, ProfileCache&, bool,
                           ProfileTimer*, const PartitionParams&);

  EncoderConfig config_;
  Matrix embedding_;
  std::vector<EncoderLayerWeights> layers_;
  LinearLayer pooler_;
  std::unique_ptr<Dispatcher> dispatcher_;
};

/// Deterministic weights from `seed`. With `profile` on, every linear layer
/// takes its flags from profile_linear through `cache` (a null timer means
/// the steady clock); otherwise every flag is true.
Model build_model(const EncoderConfig& cfg, std::uint64_t seed, std::size_t threads,
                  ProfileCache& cache, bool profile, ProfileTimer* timer = nullptr,
                  const PartitionParams& params = PartitionParams::baseline());

struct ForwardResult {
  Matrix pooled;  // 1 x d_model
  TimingBreakdown timing;
};

/// Embedding lookup, all encoder layers, then tanh(pooler(first token)).
ForwardResult model_forward(const Model& model, std::span<const std::uint32_t> token_ids,
                            std::size_t threads, const PartitionParams& params);

/// Deterministic token ids in [0, vocab).
std::vector<std::uint32_t> synthetic_tokens(std::size_t len, std::size_t vocab,
                                            std::uint64_t seed);

}  // namespace infer
