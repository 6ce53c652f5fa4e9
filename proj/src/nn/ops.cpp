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

#include "nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace infer {

LayerNormParams unit_layer_norm(std::size_t width, float eps) {
  return {std::vector<float>(width, 1.0f), std::vector<float>(width, 0.0f), eps};
}

Matrix softmax_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto src = m.row(i);
    const auto dst = out.row(i);
    const float mx = *std::max_element(src.begin(), src.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < src.size(); ++j) {
      dst[j] = std::exp(src[j] - mx);
      sum += dst[j];
    }
    const auto inv = static_cast<float>(1.0 / sum);
    for (float& v : dst) v *= inv;
  }
  return out;
}

Matrix layer_norm(const Matrix& m, const LayerNormParams& p) {
  if (p.gamma.size() != m.cols() || p.beta.size() != m.cols()) {
    throw std::invalid_argument("layer_norm: row width " + std::to_string(m.cols()) +
                                " does not match parameters of width " +
                                std::to_string(p.gamma.size()));
  }
  Matrix out(m.rows(), m.cols());
  const double n = static_cast<double>(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto src = m.row(i);
    const auto dst = out.row(i);
    double mean = 0.0;
    for (float v : src) mean += v;
    mean /= n;
    double var = 0.0;
    for (float v : src) var += (v - mean) * (v - mean);
    var /= n;
    const double inv_std = 1.0 / std::sqrt(var + p.eps);
    for (std::size_t j = 0; j < src.size(); ++j)
      dst[j] = static_cast<float>((src[j] - mean) * inv_std) * p.gamma[j] + p.beta[j];
  }
  return out;
}

Matrix gelu(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  const auto src = m.data();
  const auto dst = out.data();
  constexpr float kInvSqrt2 = 0.70710678118654752f;
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = src[i] * 0.5f * (1.0f + std::erf(src[i] * kInvSqrt2));
  return out;
}

void add_inplace(Matrix& dst, const Matrix& src) {
  if (dst.rows() != src.rows() || dst.cols() != src.cols())
    throw std::invalid_argument("add: shape mismatch");
  const auto s = src.data();
  const auto d = dst.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

void scale_inplace(Matrix& m, float factor) {
  for (float& v : m.data()) v *= factor;
}

void tanh_inplace(Matrix& m) {
  for (float& v : m.data()) v = std::tanh(v);
}

}  // namespace infer
