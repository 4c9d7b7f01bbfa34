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
#pragma once

// Shared test fixtures built from the bundled example data.

#include <vector>

#include "dptco/costs.hpp"
#include "dptco/errors.hpp"
#include "dptco/linalg.hpp"

namespace dptco::testing {

/// Six agents, f^i(z) = exp((z-c)^T P_i (z-c)) + (z-d)^T Q_i (z-d) + 1 with
/// c = (0.5, 0.5), d = (1, 1).
inline CostSet example2_costs() {
  const std::vector<Matrix> P = {
      {{0.1, 0.0}, {0.0, 0.1}}, {{0.1, 0.0}, {0.0, 0.2}},
      {{0.2, 0.0}, {0.0, 0.1}}, {{0.2, 0.0}, {0.0, 0.3}},
      {{0.4, 0.1}, {0.1, 0.6}}, {{0.1, 0.2}, {0.2, 0.5}}};
  const std::vector<Matrix> Q = {
      {{0.5, -0.2}, {-0.2, 0.3}}, {{0.1, 0.0}, {0.0, 0.1}},
      {{0.1, 0.0}, {0.0, 0.2}},   {{0.4, 0.1}, {0.1, 0.6}},
      {{0.1, 0.0}, {0.0, 0.5}},   {{0.2, -0.1}, {-0.1, 0.2}}};
  std::vector<CostFunction> agents;
  for (std::size_t i = 0; i < 6; ++i)
    agents.emplace_back(2, std::vector<QuadraticTerm>{{Q[i], {1.0, 1.0}, 1.0}},
                        std::vector<ExpQuadraticTerm>{{P[i], {0.5, 0.5}}});
  return CostSet(std::move(agents), Box::cube(2, -1.0, 2.0));
}

/// Whether `fn` threw a library error, and its code.
struct Outcome {
  bool threw = false;
  ErrorCode code = ErrorCode::kInvalidArgument;
};

template <class F>
Outcome outcome_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return {true, e.code()};
  }
  return {};
}

}  // namespace dptco::testing
