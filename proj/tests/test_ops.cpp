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

#include <cmath>

#include "core/tensor.hpp"
#include "doctest.h"
#include "nn/ops.hpp"

using namespace infer;

TEST_CASE("softmax") {
  Matrix s = softmax_rows(Matrix::from_rows({{0, 0}, {1000, 1000}, {0, std::log(3.0f)}}));
  CHECK(s(0, 0) == doctest::Approx(0.5));
  CHECK(s(1, 0) == doctest::Approx(0.5));
  CHECK(s(1, 1) == doctest::Approx(0.5));
  CHECK(s(2, 0) == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(s(2, 1) == doctest::Approx(0.75).epsilon(1e-6));

  Rng rng(1);
  Matrix x = random_matrix(17, 300, rng);
  scale_inplace(x, 200.0f);
  const Matrix y = softmax_rows(x);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    double sum = 0.0;
    for (float v : y.row(i)) {
      CHECK(v >= 0.0f);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-5);
  }
}

TEST_CASE("layer norm") {
  const Matrix y = layer_norm(Matrix::from_rows({{1, 3}}), unit_layer_norm(2, 1e-12f));
  CHECK(std::abs(y(0, 0) + 1.0f) <= 1e-3);
  CHECK(std::abs(y(0, 1) - 1.0f) <= 1e-3);

  const Matrix flat = layer_norm(Matrix(1, 4, 7.0f), unit_layer_norm(4, 1e-5f));
  for (float v : flat.data()) CHECK(v == 0.0f);

  LayerNormParams p{{2.0f, 2.0f}, {0.5f, 0.5f}, 1e-12f};
  const Matrix z = layer_norm(Matrix::from_rows({{1, 3}}), p);
  CHECK(z(0, 0) == doctest::Approx(-1.5).epsilon(1e-4));
  CHECK(z(0, 1) == doctest::Approx(2.5).epsilon(1e-4));
}

TEST_CASE("gelu against the erf form") {
  const Matrix y = gelu(Matrix::from_rows({{0.0f, 10.0f, 1.0f, -1.0f, -10.0f}}));
  CHECK(y(0, 0) == 0.0f);
  CHECK(y(0, 1) == doctest::Approx(10.0));
  const double oracle = 0.5 * (1.0 + std::erf(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(y(0, 2) - oracle) <= 1e-4);
  CHECK(std::abs(y(0, 2) - 0.8413) <= 1e-4);
  CHECK(std::abs(y(0, 3) + (1.0 - oracle)) <= 1e-4);
  CHECK(std::abs(y(0, 4)) <= 1e-6);
}

TEST_CASE("elementwise helpers") {
  Matrix a = Matrix::from_rows({{1, 2}});
  add_inplace(a, Matrix::from_rows({{3, 4}}));
  CHECK(a == Matrix::from_rows({{4, 6}}));
  scale_inplace(a, 0.5f);
  CHECK(a == Matrix::from_rows({{2, 3}}));
  Matrix t = Matrix::from_rows({{0, 100}});
  tanh_inplace(t);
  CHECK(t(0, 0) == 0.0f);
  CHECK(t(0, 1) == doctest::Approx(1.0));
}
