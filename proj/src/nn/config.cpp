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

#include "nn/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace infer {

void validate(const EncoderConfig& cfg) {
  if (cfg.layers == 0 || cfg.heads == 0 || cfg.d_model == 0 || cfg.d_ff == 0 || cfg.d_k == 0 ||
      cfg.max_len == 0 || cfg.vocab == 0) {
    throw std::invalid_argument("encoder config: all counts must be >= 1");
  }
  if (cfg.heads * cfg.d_k != cfg.d_model) {
    throw std::invalid_argument("encoder config: heads * d_k (" +
                                std::to_string(cfg.heads * cfg.d_k) + ") != d_model (" +
                                std::to_string(cfg.d_model) + ")");
  }
  if (cfg.max_len > 512)
    throw std::invalid_argument("encoder config: max_len must be <= 512");
  if (!(cfg.layernorm_eps >= 0.0f))
    throw std::invalid_argument("encoder config: layernorm_eps must be >= 0");
}

EncoderConfig bert_base() { return {}; }

EncoderConfig bert_large() {
  EncoderConfig cfg;
  cfg.layers = 24;
  cfg.heads = 16;
  cfg.d_model = 1024;
  cfg.d_ff = 4096;
  cfg.d_k = 64;
  return cfg;
}

EncoderConfig distil() {
  EncoderConfig cfg;
  cfg.layers = 6;
  return cfg;
}

EncoderConfig preset(std::string_view name) {
  if (name == "bert-base") return bert_base();
  if (name == "bert-large") return bert_large();
  if (name == "distil") return distil();
  throw std::invalid_argument("unknown config preset '" + std::string(name) + "'");
}

ModelSpec parse_model_spec(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config: top level must be an object");

  ModelSpec spec;
  auto& c = spec.config;
  try {
    c.layers = doc.value("layers", c.layers);
    c.heads = doc.value("heads", c.heads);
    c.d_model = doc.value("d_model", c.d_model);
    c.d_ff = doc.value("d_ff", c.d_ff);
    c.d_k = doc.value("d_k", c.d_k);
    c.max_len = doc.value("max_len", c.max_len);
    c.layernorm_eps = doc.value("layernorm_eps", c.layernorm_eps);
    c.vocab = doc.value("vocab", c.vocab);
    spec.seed = doc.value("seed", spec.seed);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: bad value: ") + e.what());
  }
  validate(c);
  return spec;
}

ModelSpec load_model_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_model_spec(text.str());
}

ModelSpec resolve_model_spec(const std::string& name_or_path) {
  if (name_or_path == "bert-base" || name_or_path == "bert-large" || name_or_path == "distil")
    return {preset(name_or_path), kDefaultSeed};
  return load_model_spec(name_or_path);
}

}  // namespace infer
