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
#include "dptco/graph.hpp"

#include <cmath>
#include <deque>
#include <sstream>

#include "dptco/errors.hpp"

namespace dptco {

Network build_network(std::size_t n, const std::vector<Edge>& edges) {
  if (n == 0) throw Error(ErrorCode::kDegenerateSize, "network needs N >= 1");
  Network net;
  net.n_ = n;
  net.adjacency_ = Matrix(n, n);
  net.neighbors_.assign(n, {});
  for (const Edge& e : edges) {
    if (e.i >= n || e.j >= n) {
      std::ostringstream os;
      os << "edge (" << e.i << "," << e.j << ") out of range for N=" << n;
      throw Error(ErrorCode::kInvalidArgument, os.str());
    }
    if (e.i == e.j) {
      std::ostringstream os;
      os << "self loop at node " << e.i;
      throw Error(ErrorCode::kSelfLoop, os.str());
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      std::ostringstream os;
      os << "edge (" << e.i << "," << e.j << ") has non-positive weight "
         << e.weight;
      throw Error(ErrorCode::kNegativeWeight, os.str());
    }
    if (net.adjacency_(e.i, e.j) != 0.0) {
      std::ostringstream os;
      os << "edge (" << e.i << "," << e.j << ") listed twice";
      throw Error(ErrorCode::kInvalidArgument, os.str());
    }
    net.adjacency_(e.i, e.j) = e.weight;
    net.adjacency_(e.j, e.i) = e.weight;
    net.edges_.push_back(e);
  }
  net.laplacian_ = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = net.adjacency_(i, j);
      if (a == 0.0) continue;
      deg += a;
      net.laplacian_(i, j) = -a;
      net.neighbors_[i].push_back({j, a});
    }
    net.laplacian_(i, i) = deg;
  }
  net.spectrum_ = jacobi_eigen(net.laplacian_, 1e-12).values;
  return net;
}

Network ring_network(std::size_t n) {
  std::vector<Edge> edges;
  if (n == 2) edges.push_back({0, 1, 1.0});
  if (n >= 3)
    for (std::size_t i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
  return build_network(n, edges);
}

ConnectivityCertificate require_connected(const Network& net) {
  const std::size_t n = net.size();
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (const Neighbor& nb : net.neighbors(u)) {
      if (seen[nb.index]) continue;
      seen[nb.index] = true;
      ++reached;
      queue.push_back(nb.index);
    }
  }
  std::vector<std::size_t> unreached;
  for (std::size_t i = 0; i < n; ++i)
    if (!seen[i]) unreached.push_back(i);
  const bool spectral_ok = n < 2 || net.lambda2() > 1e-10;
  if (!unreached.empty() || !spectral_ok)
    throw DisconnectedError(std::move(unreached));
  return {net.lambda2(), reached};
}

ReducedBasis reduced_basis(std::size_t n) {
  if (n < 2)
    throw Error(ErrorCode::kDegenerateSize, "reduced basis needs N >= 2");
  ReducedBasis b{Vector(n, 1.0 / std::sqrt(static_cast<double>(n))),
                 Matrix(n, n - 1)};
  std::vector<Vector> done{b.r};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    Vector v(n, 0.0);
    v[k] = 1.0;
    // Modified Gram-Schmidt, applied twice for orthogonality to round-off.
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& q : done) {
        const double c = dot(v, q);
        for (std::size_t i = 0; i < n; ++i) v[i] -= c * q[i];
      }
    const double len = norm2(v);
    for (double& x : v) x /= len;
    for (double x : v) {
      if (x == 0.0) continue;
      if (x < 0.0)
        for (double& y : v) y = -y;
      break;
    }
    for (std::size_t i = 0; i < n; ++i) b.R(i, k) = v[i];
    done.push_back(std::move(v));
  }
  return b;
}

Matrix reduced_laplacian(const Network& net, const ReducedBasis& basis) {
  return basis.R.transpose() * net.laplacian() * basis.R;
}

}  // namespace dptco
