/******************************************************************************
 * Copyright 2026 The DPTCO Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include <algorithm>
#include <cmath>
#include <complex>

#include "doctest.h"
#include "dptco/errors.hpp"
#include "dptco/linalg.hpp"

using namespace dptco;

TEST_CASE("matrix products and kron") {
  Matrix a{{1, 2}, {3, 4}};
  Matrix b{{0, 1}, {1, 0}};
  Matrix ab = a * b;
  CHECK(ab(0, 0) == 2);
  CHECK(ab(0, 1) == 1);
  CHECK(ab(1, 0) == 4);
  CHECK(ab(1, 1) == 3);
  Matrix k = kron(Matrix::identity(2), a);
  CHECK(k.rows() == 4);
  CHECK(k(2, 3) == 2);
  CHECK(k(0, 2) == 0);
  CHECK(max_abs_asymmetry(a) == doctest::Approx(1.0));
  Vector y = a * Vector{1.0, 1.0};
  CHECK(y[0] == 3);
  CHECK(y[1] == 7);
}

TEST_CASE("jacobi eigen of a symmetric matrix") {
  Matrix a{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
  SymmetricEigen e = jacobi_eigen(a);
  // Path-graph style tridiagonal: 2 - 2 cos(k pi / 4).
  for (int k = 1; k <= 3; ++k)
    CHECK(e.values[k - 1] ==
          doctest::Approx(2.0 - 2.0 * std::cos(k * M_PI / 4.0)).epsilon(1e-12));
  for (std::size_t k = 0; k < 3; ++k) {
    Vector v = e.vectors.column(k);
    Vector av = a * v;
    for (std::size_t r = 0; r < 3; ++r)
      CHECK(std::abs(av[r] - e.values[k] * v[r]) < 1e-10);
  }
}

TEST_CASE("general eigenvalues of a companion matrix") {
  Matrix a{{0, 1}, {-2, -3}};
  auto ev = eigenvalues(a);
  std::vector<double> re;
  for (auto z : ev) {
    CHECK(std::abs(z.imag()) < 1e-10);
    re.push_back(z.real());
  }
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-2.0));
  CHECK(re[1] == doctest::Approx(-1.0));

  Matrix rot{{0, -1}, {1, 0}};
  auto ev2 = eigenvalues(rot);
  for (auto z : ev2) {
    CHECK(std::abs(z.real()) < 1e-12);
    CHECK(std::abs(std::abs(z.imag()) - 1.0) < 1e-12);
  }
}

TEST_CASE("solve and inverse") {
  Matrix a{{4, 1}, {2, 3}};
  Vector x = solve(a, Vector{1.0, 2.0});
  CHECK(x[0] == doctest::Approx(0.1));
  CHECK(x[1] == doctest::Approx(0.6));
  Matrix id = a * inverse(a);
  CHECK(frobenius_norm(id - Matrix::identity(2)) < 1e-14);
  Matrix sing{{1, 2}, {2, 4}};
  try {
    solve(sing, Vector{1.0, 1.0});
    FAIL("expected singular system");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularSystem);
  }
}
