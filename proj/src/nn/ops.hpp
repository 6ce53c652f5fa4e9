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

#include <vector>

#include "core/tensor.hpp"

namespace infer {

struct LayerNormParams {
  std::vector<float> gamma;
  std::vector<float> beta;
  float eps = 1e-12f;
};

LayerNormParams unit_layer_norm(std::size_t width, float eps);

/// Row-wise softmax with max subtraction.
Matrix softmax_rows(const Matrix& m);

/// Per row: (x - mean) / sqrt(var + eps) * gamma + beta, population variance.
Matrix layer_norm(const Matrix& m, const LayerNormParams& p);

/// x * Phi(x), Phi from erf.
Matrix gelu(const Matrix& m);

void add_inplace(Matrix& dst, const Matrix& src);
void scale_inplace(Matrix& m, float factor);
void tanh_inplace(Matrix& m);

}  // namespace infer
