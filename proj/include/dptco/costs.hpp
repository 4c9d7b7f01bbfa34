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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dptco/linalg.hpp"

namespace dptco {

/// (z - center)^T Q (z - center) + offset, Q symmetric positive definite.
struct QuadraticTerm {
  Matrix Q;
  Vector center;
  double offset = 0.0;
};

/// exp((z - center)^T P (z - center)), P symmetric positive semidefinite.
struct ExpQuadraticTerm {
  Matrix P;
  Vector center;
};

/// One agent's local cost: a sum of quadratic and exp-quadratic terms.
class CostFunction {
 public:
  CostFunction(std::size_t dim, std::vector<QuadraticTerm> quad,
               std::vector<ExpQuadraticTerm> expq = {});

  static CostFunction quadratic(Matrix Q, Vector center, double offset = 0.0);

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<QuadraticTerm>& quadratic_terms() const noexcept {
    return quad_;
  }
  const std::vector<ExpQuadraticTerm>& exp_terms() const noexcept {
    return expq_;
  }
  bool purely_quadratic() const noexcept { return expq_.empty(); }

  double value(std::span<const double> z) const;
  Vector gradient(std::span<const double> z) const;
  /// Analytic Hessian; used only by verification code.
  Matrix hessian(std::span<const double> z) const;

  /// (2 lambda_min(sum Q), 2 lambda_max(sum Q)) for purely quadratic costs.
  std::optional<std::pair<double, double>> analytic_constants() const;

 private:
  std::size_t dim_;
  std::vector<QuadraticTerm> quad_;
  std::vector<ExpQuadraticTerm> expq_;
};

struct Box {
  Vector lo;
  Vector hi;
  static Box cube(std::size_t dim, double lo, double hi);
};

struct CostConstants {
  double rho = 0.0;     // strong convexity
  double varrho = 0.0;  // gradient Lipschitz
  bool analytic = false;
};

/// Per-agent costs sharing dimension m, plus the working box on which the
/// aggregate constants are declared.
class CostSet {
 public:
  CostSet(std::vector<CostFunction> agents, std::optional<Box> box = {});

  std::size_t size() const noexcept { return agents_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const CostFunction& agent(std::size_t i) const { return agents_.at(i); }
  const std::vector<CostFunction>& agents() const noexcept { return agents_; }
  const Box& box() const noexcept { return box_; }

  double total_value(std::span<const double> z) const;

 private:
  std::vector<CostFunction> agents_;
  std::size_t dim_;
  Box box_;
};

/// sum_i grad f^i(z); throws kDimensionMismatch.
Vector grad_sum(const CostSet& costs, std::span<const double> z);

struct OptimumCertificate {
  Vector z;
  double grad_norm = 0.0;
  long iterations = 0;
};

/// Damped Newton with backtracking and a finite-difference Hessian of the
/// summed cost. Throws kNoConvergence after 10^4 iterations.
OptimumCertificate optimum_oracle(const CostSet& costs, double tol,
                                  std::span<const double> z_init);

/// Pairwise-sampled (rho_hat, varrho_hat) on a box with a fixed seed.
/// Pair quotients are refined with finite-difference Hessian spectra at the
/// sampled points so purely quadratic costs bracket their analytic values.
CostConstants estimate_constants(const CostFunction& f, const Box& box,
                                 std::size_t samples, std::uint64_t seed = 1);

/// Aggregate constants: min rho / max varrho over agents, analytic where
/// every agent is purely quadratic, otherwise estimated on the set's box.
CostConstants aggregate_constants(const CostSet& costs,
                                  std::size_t samples = 400);

}  // namespace dptco
