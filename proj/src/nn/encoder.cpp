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

#include "nn/encoder.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace infer {
namespace {

// Columns [h * d_k, (h + 1) * d_k) of m.
Matrix head_slice(const Matrix& m, std::size_t h, std::size_t d_k) {
  Matrix out(m.rows(), d_k);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto src = m.row(i).subspan(h * d_k, d_k);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

LinearLayer random_linear(std::size_t in, std::size_t out, Rng& rng) {
  Matrix w = random_matrix(in, out, rng);
  scale_inplace(w, 1.0f / std::sqrt(static_cast<float>(in)));
  std::vector<float> bias(out);
  for (float& b : bias) b = 0.1f * rng.uniform();
  return LinearLayer(std::move(w), std::move(bias));
}

LayerNormParams random_norm(std::size_t width, float eps, Rng& rng) {
  LayerNormParams p{std::vector<float>(width), std::vector<float>(width), eps};
  for (float& g : p.gamma) g = 1.0f + 0.1f * rng.uniform();
  for (float& b : p.beta) b = 0.1f * rng.uniform();
  return p;
}

void require_width(const Matrix& x, std::size_t width, const char* what) {
  if (x.cols() != width) {
    throw std::invalid_argument(std::string(what) + ": input width " + std::to_string(x.cols()) +
                                " != " + std::to_string(width));
  }
}

}  // namespace

Matrix self_attention(const Matrix& x, const AttentionWeights& w, const EncoderConfig& cfg,
                      const ExecContext& ctx) {
  require_width(x, cfg.d_model, "self_attention");
  Dispatcher& disp = *ctx.dispatcher;
  const Matrix q = linear_forward(x, w.wq, ctx.threads, ctx.params, disp);
  const Matrix k = linear_forward(x, w.wk, ctx.threads, ctx.params, disp);
  const Matrix v = linear_forward(x, w.wv, ctx.threads, ctx.params, disp);
  ctx.lap(ModuleCat::Linear, SublayerCat::AttnSelf);

  std::vector<GemmTask> score_tasks;
  score_tasks.reserve(cfg.heads);
  for (std::size_t h = 0; h < cfg.heads; ++h)
    score_tasks.push_back({head_slice(q, h, cfg.d_k), head_slice(k, h, cfg.d_k), TransposeMode::NT});
  ctx.lap(ModuleCat::Other, SublayerCat::AttnSelf);

  std::vector<Matrix> scores = gemm_batched(score_tasks, ctx.params, ctx.threads);
  ctx.lap(ModuleCat::Bmm, SublayerCat::AttnSelf);

  const float scale = 1.0f / std::sqrt(static_cast<float>(cfg.d_k));
  for (auto& s : scores) scale_inplace(s, scale);
  ctx.lap(ModuleCat::Other, SublayerCat::AttnSelf);

  std::vector<GemmTask> value_tasks;
  value_tasks.reserve(cfg.heads);
  for (std::size_t h = 0; h < cfg.heads; ++h)
    value_tasks.push_back({softmax_rows(scores[h]), Matrix(1, 1), TransposeMode::NN});
  ctx.lap(ModuleCat::Softmax, SublayerCat::AttnSelf);

  for (std::size_t h = 0; h < cfg.heads; ++h) value_tasks[h].b = head_slice(v, h, cfg.d_k);
  ctx.lap(ModuleCat::Other, SublayerCat::AttnSelf);

  const std::vector<Matrix> heads = gemm_batched(value_tasks, ctx.params, ctx.threads);
  ctx.lap(ModuleCat::Bmm, SublayerCat::AttnSelf);

  Matrix concat(x.rows(), cfg.d_model);
  for (std::size_t h = 0; h < cfg.heads; ++h)
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto src = heads[h].row(i);
      std::copy(src.begin(), src.end(), concat.row(i).begin() + h * cfg.d_k);
    }
  ctx.lap(ModuleCat::Other, SublayerCat::AttnSelf);

  Matrix out = linear_forward(concat, w.wo, ctx.threads, ctx.params, disp);
  ctx.lap(ModuleCat::Linear, SublayerCat::AttnDense);
  return out;
}

Matrix feed_forward(const Matrix& x, const FfnWeights& w, const ExecContext& ctx) {
  require_width(x, w.w1.in_dim(), "feed_forward");
  const Matrix hidden = linear_forward(x, w.w1, ctx.threads, ctx.params, *ctx.dispatcher);
  ctx.lap(ModuleCat::Linear, SublayerCat::FfnDense1);
  const Matrix act = gelu(hidden);
  ctx.lap(ModuleCat::Activation, SublayerCat::FfnOther);
  Matrix out = linear_forward(act, w.w2, ctx.threads, ctx.params, *ctx.dispatcher);
  ctx.lap(ModuleCat::Linear, SublayerCat::FfnDense2);
  return out;
}

Matrix encoder_layer(const Matrix& x, const EncoderLayerWeights& w, const EncoderConfig& cfg,
                     const ExecContext& ctx) {
  Matrix sum = self_attention(x, w.attention, cfg, ctx);
  add_inplace(sum, x);
  ctx.lap(ModuleCat::Other, SublayerCat::AttnOther);
  const Matrix y1 = layer_norm(sum, w.attention_norm);
  ctx.lap(ModuleCat::LayerNorm, SublayerCat::AttnLayerNorm);

  Matrix sum2 = feed_forward(y1, w.ffn, ctx);
  add_inplace(sum2, y1);
  ctx.lap(ModuleCat::Other, SublayerCat::FfnOther);
  Matrix y2 = layer_norm(sum2, w.ffn_norm);
  ctx.lap(ModuleCat::LayerNorm, SublayerCat::FfnLayerNorm);
  return y2;
}

Model::Model(EncoderConfig config, Matrix embedding, std::vector<EncoderLayerWeights> layers,
             LinearLayer pooler)
    : config_(config),
      embedding_(std::move(embedding)),
      layers_(std::move(layers)),
      pooler_(std::move(pooler)),
      dispatcher_(std::make_unique<Dispatcher>()) {
  validate(config_);
  if (layers_.size() != config_.layers) throw std::invalid_argument("model: layer count mismatch");
  if (embedding_.rows() != config_.vocab || embedding_.cols() != config_.d_model)
    throw std::invalid_argument("model: embedding shape mismatch");
}

std::vector<const LinearLayer*> Model::linear_layers() const {
  std::vector<const LinearLayer*> out;
  out.reserve(layers_.size() * 6 + 1);
  for (const auto& l : layers_) {
    for (const LinearLayer* p : {&l.attention.wq, &l.attention.wk, &l.attention.wv,
                                 &l.attention.wo, &l.ffn.w1, &l.ffn.w2})
      out.push_back(p);
  }
  out.push_back(&pooler_);
  return out;
}

Model build_model(const EncoderConfig& cfg, std::uint64_t seed, std::size_t threads,
                  ProfileCache& cache, bool profile, ProfileTimer* timer,
                  const PartitionParams& params) {
  validate(cfg);
  if (threads == 0) throw std::invalid_argument("build_model: threads must be >= 1");
  Rng rng(seed);
  Matrix embedding = random_matrix(cfg.vocab, cfg.d_model, rng);

  std::vector<EncoderLayerWeights> layers;
  layers.reserve(cfg.layers);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    AttentionWeights attn{random_linear(cfg.d_model, cfg.d_model, rng),
                          random_linear(cfg.d_model, cfg.d_model, rng),
                          random_linear(cfg.d_model, cfg.d_model, rng),
                          random_linear(cfg.d_model, cfg.d_model, rng)};
    LayerNormParams attn_norm = random_norm(cfg.d_model, cfg.layernorm_eps, rng);
    FfnWeights ffn{random_linear(cfg.d_model, cfg.d_ff, rng),
                   random_linear(cfg.d_ff, cfg.d_model, rng)};
    LayerNormParams ffn_norm = random_norm(cfg.d_model, cfg.layernorm_eps, rng);
    layers.push_back({std::move(attn), std::move(attn_norm), std::move(ffn), std::move(ffn_norm)});
  }
  LinearLayer pooler = random_linear(cfg.d_model, cfg.d_model, rng);

  Model model(cfg, std::move(embedding), std::move(layers), std::move(pooler));
  if (profile) {
    SteadyProfileTimer steady;
    ProfileTimer& t = timer ? *timer : steady;
    auto assign = [&](LinearLayer& layer) {
      layer.set_flags(profile_linear(layer.in_dim(), layer.out_dim(), threads, cache, t,
                                     *model.dispatcher_, params));
    };
    for (auto& l : model.layers_) {
      for (LinearLayer* p : {&l.attention.wq, &l.attention.wk, &l.attention.wv, &l.attention.wo,
                             &l.ffn.w1, &l.ffn.w2})
        assign(*p);
    }
    assign(model.pooler_);
  }
  return model;
}

ForwardResult model_forward(const Model& model, std::span<const std::uint32_t> token_ids,
                            std::size_t threads, const PartitionParams& params) {
  const EncoderConfig& cfg = model.config();
  if (token_ids.empty()) throw std::invalid_argument("model_forward: empty input");
  if (token_ids.size() > cfg.max_len) {
    throw std::invalid_argument("model_forward: sequence length " +
                                std::to_string(token_ids.size()) + " exceeds max_len " +
                                std::to_string(cfg.max_len));
  }
  for (std::uint32_t id : token_ids) {
    if (id >= cfg.vocab) {
      throw std::invalid_argument("model_forward: token id " + std::to_string(id) +
                                  " out of vocabulary (" + std::to_string(cfg.vocab) + ")");
    }
  }
  if (threads == 0) throw std::invalid_argument("model_forward: threads must be >= 1");
  validate(params);

  TimingBreakdown timing;
  Tracer tracer(&timing);
  const ExecContext ctx{threads, params, &model.dispatcher(), &tracer};

  Matrix x(token_ids.size(), cfg.d_model);
  for (std::size_t i = 0; i < token_ids.size(); ++i) {
    const auto src = model.embedding().row(token_ids[i]);
    std::copy(src.begin(), src.end(), x.row(i).begin());
  }
  ctx.lap(ModuleCat::Other, SublayerCat::Other);

  for (const auto& layer : model.layers()) x = encoder_layer(x, layer, cfg, ctx);

  Matrix first(1, cfg.d_model);
  std::copy(x.row(0).begin(), x.row(0).end(), first.row(0).begin());
  ctx.lap(ModuleCat::Other, SublayerCat::Other);
  Matrix pooled = linear_forward(first, model.pooler(), threads, params, model.dispatcher());
  ctx.lap(ModuleCat::Linear, SublayerCat::Other);
  tanh_inplace(pooled);
  ctx.lap(ModuleCat::Activation, SublayerCat::Other);
  tracer.finish();
  return {std::move(pooled), timing};
}

std::vector<std::uint32_t> synthetic_tokens(std::size_t len, std::size_t vocab,
                                            std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint32_t> ids(len);
  for (auto& id : ids) id = static_cast<std::uint32_t>(rng.next_u64() % vocab);
  return ids;
}

}  // namespace infer
