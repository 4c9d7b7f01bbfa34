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
#include <cmath>

#include "doctest.h"
#include "dptco/errors.hpp"
#include "dptco/graph.hpp"
#include "fixtures.hpp"

using namespace dptco;
using dptco::testing::outcome_of;

TEST_CASE("laplacian spectra of small graphs") {
  Network k2 = build_network(2, {{0, 1, 1.0}});
  CHECK(k2.laplacian()(0, 0) == 1.0);
  CHECK(k2.laplacian()(0, 1) == -1.0);
  CHECK(k2.lambda2() == doctest::Approx(2.0));
  CHECK(k2.lambda_n() == doctest::Approx(2.0));

  Network ring = ring_network(6);
  // Circulant oracle 2 - 2 cos(2 pi k / 6).
  std::vector<double> expect;
  for (int k = 0; k < 6; ++k) expect.push_back(2 - 2 * std::cos(2 * M_PI * k / 6));
  std::sort(expect.begin(), expect.end());
  for (std::size_t k = 0; k < 6; ++k)
    CHECK(std::abs(ring.spectrum()[k] - expect[k]) < 1e-12);
  CHECK(ring.lambda2() == doctest::Approx(1.0));
  CHECK(ring.lambda_n() == doctest::Approx(4.0));

  Network path = build_network(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  CHECK(path.lambda2() == doctest::Approx(1.0));
  CHECK(path.lambda_n() == doctest::Approx(3.0));
}

TEST_CASE("laplacian invariants") {
  Network net = build_network(4, {{0, 1, 0.5}, {1, 2, 2.0}, {2, 3, 1.0}, {3, 0, 1.5}});
  for (std::size_t i = 0; i < 4; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      row += net.laplacian()(i, j);
      CHECK(net.adjacency()(i, j) == net.adjacency()(j, i));
    }
    CHECK(std::abs(row) < 1e-15);
    CHECK(net.adjacency()(i, i) == 0.0);
  }
  CHECK(net.neighbors(1).size() == 2);
}

TEST_CASE("network construction errors") {
  auto self = outcome_of([] { build_network(3, {{1, 1, 1.0}}); });
  CHECK(self.threw);
  CHECK(self.code == ErrorCode::kSelfLoop);
  auto neg = outcome_of([] { build_network(3, {{0, 1, -1.0}}); });
  CHECK(neg.code == ErrorCode::kNegativeWeight);
  auto range = outcome_of([] { build_network(3, {{0, 5, 1.0}}); });
  CHECK(range.code == ErrorCode::kInvalidArgument);
}

TEST_CASE("connectivity certificate") {
  CHECK(require_connected(ring_network(6)).reached == 6);
  Network split = build_network(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  try {
    require_connected(split);
    FAIL("expected disconnected");
  } catch (const DisconnectedError& e) {
    CHECK(e.code() == ErrorCode::kDisconnected);
    REQUIRE(e.unreached().size() == 2);
    CHECK(e.unreached()[0] == 2);
    CHECK(e.unreached()[1] == 3);
  }
  CHECK_NOTHROW(require_connected(build_network(1, {})));
}

TEST_CASE("reduced basis") {
  ReducedBasis b2 = reduced_basis(2);
  CHECK(b2.R(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(b2.R(1, 0) == doctest::Approx(-1 / std::sqrt(2.0)));

  ReducedBasis b3 = reduced_basis(3);
  Matrix rtr = b3.R.transpose() * b3.R;
  CHECK(frobenius_norm(rtr - Matrix::identity(2)) < 1e-12);

  ReducedBasis b6 = reduced_basis(6);
  Matrix proj = b6.R * b6.R.transpose();
  Vector ones(6, 1.0);
  CHECK(norm2(proj * ones) < 1e-12);
  CHECK(std::abs(dot(b6.r, b6.R.column(3))) < 1e-12);
  Matrix expect = Matrix::identity(6) - (1.0 / 6.0) * Matrix(6, 6, 1.0);
  CHECK(frobenius_norm(proj - expect) < 1e-10);

  CHECK(outcome_of([] { reduced_basis(1); }).code == ErrorCode::kDegenerateSize);

  Matrix lr = reduced_laplacian(ring_network(6), b6);
  auto e = jacobi_eigen(lr);
  CHECK(e.values.front() == doctest::Approx(1.0));
  CHECK(e.values.back() == doctest::Approx(4.0));
}
