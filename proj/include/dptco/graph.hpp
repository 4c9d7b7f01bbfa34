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
#include <vector>

#include "dptco/linalg.hpp"

namespace dptco {

struct Edge {
  std::size_t i;
  std::size_t j;
  double weight;
};

struct Neighbor {
  std::size_t index;
  double weight;
};

/// Undirected weighted communication graph. Immutable after construction.
class Network {
 public:
  std::size_t size() const noexcept { return n_; }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  const Matrix& laplacian() const noexcept { return laplacian_; }
  /// Laplacian spectrum, ascending.
  const Vector& spectrum() const noexcept { return spectrum_; }
  double lambda2() const noexcept { return n_ >= 2 ? spectrum_[1] : 0.0; }
  double lambda_n() const noexcept { return n_ ? spectrum_.back() : 0.0; }
  const std::vector<Neighbor>& neighbors(std::size_t i) const {
    return neighbors_.at(i);
  }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

 private:
  friend Network build_network(std::size_t, const std::vector<Edge>&);
  std::size_t n_ = 0;
  Matrix adjacency_;
  Matrix laplacian_;
  Vector spectrum_;
  std::vector<std::vector<Neighbor>> neighbors_;
  std::vector<Edge> edges_;
};

/// Throws kSelfLoop, kNegativeWeight (weight <= 0) or kInvalidArgument for
/// out-of-range or repeated edges.
Network build_network(std::size_t n_agents, const std::vector<Edge>& edges);

/// Unit-weight cycle 0-1-...-(n-1)-0.
Network ring_network(std::size_t n);

struct ConnectivityCertificate {
  double lambda2;
  std::size_t reached;
};

/// Two independent witnesses: lambda2 > 1e-10 and a BFS from node 0 that
/// reaches every node. Throws DisconnectedError listing unreached nodes.
ConnectivityCertificate require_connected(const Network& net);

struct ReducedBasis {
  Vector r;  // 1_N / sqrt(N)
  Matrix R;  // N x (N-1), orthonormal complement of r
};

/// Gram-Schmidt of e_1..e_{N-1} against r; each column's first nonzero entry
/// is positive. Throws kDegenerateSize for N < 2.
ReducedBasis reduced_basis(std::size_t n);

/// R^T L R.
Matrix reduced_laplacian(const Network& net, const ReducedBasis& basis);

}  // namespace dptco
