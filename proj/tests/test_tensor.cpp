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
#include <stdexcept>

#include "core/tensor.hpp"
#include "doctest.h"

using infer::Matrix;
using infer::Rng;

TEST_CASE("matrix rejects empty shapes") {
  CHECK_THROWS_AS(Matrix(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<float>(3)), std::invalid_argument);
}

TEST_CASE("matrix is row-major") {
  Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.data()[4] == 5.0f);
  CHECK(m(1, 2) == 6.0f);
  CHECK(m.row(1)[0] == 4.0f);
}

TEST_CASE("rng golden stream for seed 42") {
  Rng rng(42);
  const Matrix m = infer::random_matrix(2, 3, rng);
  const float expect[] = {0.24156487f, -0.340089619f, -0.22139889f,
                          -0.155809343f, -0.461969852f, 0.368228018f};
  for (std::size_t i = 0; i < 6; ++i) CHECK(m.data()[i] == expect[i]);

  Rng again(42);
  CHECK(again.next_u64() == 13679457532755275413ULL);
}

TEST_CASE("rng range and determinism") {
  Rng a(7), b(7);
  for (int i = 0; i < 10000; ++i) {
    const float x = a.uniform();
    CHECK(x >= -0.5f);
    CHECK(x < 0.5f);
    CHECK(x == b.uniform());
  }
}

TEST_CASE("transpose examples") {
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(infer::transpose(m) == Matrix::from_rows({{1, 4}, {2, 5}, {3, 6}}));
  CHECK(infer::transpose(Matrix::from_rows({{9}})) == Matrix::from_rows({{9}}));

  Rng rng(3);
  for (std::size_t r : {1u, 31u, 33u, 70u}) {
    for (std::size_t c : {1u, 32u, 65u}) {
      const Matrix x = infer::random_matrix(r, c, rng);
      const Matrix t = infer::transpose(x);
      REQUIRE(t.rows() == c);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) CHECK(t(j, i) == x(i, j));
      CHECK(infer::transpose(t) == x);
    }
  }
}

TEST_CASE("max_rel_err") {
  const Matrix a = Matrix::from_rows({{1.0f, 2.0f}});
  const Matrix b = Matrix::from_rows({{1.0f, 2.002f}});
  CHECK(infer::max_rel_err(a, a) == 0.0);
  CHECK(infer::max_rel_err(a, b) == doctest::Approx(0.000999).epsilon(1e-3));
  CHECK(infer::max_rel_err(a, b) == infer::max_rel_err(b, a));
  CHECK(infer::max_rel_err(Matrix(1, 1, 0.0f), Matrix(1, 1, 0.0f)) == 0.0);
  CHECK_THROWS_AS(infer::max_rel_err(a, Matrix(2, 1)), std::invalid_argument);
}
