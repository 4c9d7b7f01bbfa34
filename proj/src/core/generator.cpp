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
#include "dptco/generator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dptco/errors.hpp"

namespace dptco {

GeneratorConstants generator_constants(double rho, double varrho,
                                       double lambda2, double lambda_n) {
  if (!(rho > 0.0) || !(varrho > 0.0) || !(lambda2 > 0.0) ||
      !(lambda_n > 0.0))
    throw Error(ErrorCode::kNonPositiveInput,
                "generator constants need rho, varrho, lambda2, lambdaN > 0");
  GeneratorConstants c;
  c.c1 = std::max(1.0 / lambda2, (1.0 + 2.0 * varrho * varrho) / (2.0 * rho));
  c.c2 = 0.5 * c.c1 * std::min(1.0, 1.0 / lambda_n);
  c.c3 = c.c1 * std::max(1.0, 1.0 / lambda2) + 1.0;
  c.c_star = 1.0 / (4.0 * c.c3);
  return c;
}

void generator_agent_rhs(std::span<const double> varpi_i,
                         std::span<const double> p_i,
                         const std::vector<NeighborValue>& neighbors,
                         const CostFunction& cost, double alpha,
                         std::span<double> dvarpi_i, std::span<double> dp_i) {
  const std::size_t m = varpi_i.size();
  const Vector g = cost.gradient(varpi_i);
  for (std::size_t k = 0; k < m; ++k) {
    double lap = 0.0;
    for (const NeighborValue& nb : neighbors)
      lap += nb.weight * (varpi_i[k] - nb.varpi[k]);
    dvarpi_i[k] = -alpha * (lap + g[k] + p_i[k]);
    dp_i[k] = alpha * lap;
  }
}

void generator_rhs(const Network& net, const CostSet& costs, double alpha,
                   std::span<const double> varpi, std::span<const double> p,
                   std::span<double> dvarpi, std::span<double> dp) {
  const std::size_t n = net.size(), m = costs.dim();
  if (costs.size() != n || varpi.size() != n * m || p.size() != n * m ||
      dvarpi.size() != n * m || dp.size() != n * m)
    throw Error(ErrorCode::kDimensionMismatch,
                "generator state does not match network and cost set");
  std::vector<NeighborValue> nbrs;
  for (std::size_t i = 0; i < n; ++i) {
    nbrs.clear();
    for (const Neighbor& nb : net.neighbors(i))
      nbrs.push_back({nb.weight, varpi.subspan(nb.index * m, m)});
    generator_agent_rhs(varpi.subspan(i * m, m), p.subspan(i * m, m), nbrs,
                        costs.agent(i), alpha, dvarpi.subspan(i * m, m),
                        dp.subspan(i * m, m));
  }
}

GeneratorState generator_rhs(const GeneratorState& s, double t,
                             const Network& net, const CostSet& costs,
                             const GainFunction& alpha,
                             const PrescribedClock& clock) {
  const double a = alpha(clock.mu(t));
  GeneratorState d{s.n, s.m, Vector(s.varpi.size()), Vector(s.p.size())};
  generator_rhs(net, costs, a, s.varpi, s.p, d.varpi, d.p);
  return d;
}

Vector init_p(std::size_t n, std::size_t m, InitPMode mode,
              std::uint64_t seed) {
  Vector p(n * m, 0.0);
  if (mode == InitPMode::kZeros || n <= 1) return p;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : p) v = dist(rng);
  for (std::size_t k = 0; k < m; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += p[i * m + k];
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) p[i * m + k] -= mean;
    // Put the residual round-off of the mean subtraction on the last agent.
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) sum += p[i * m + k];
    p[(n - 1) * m + k] = -sum;
  }
  return p;
}

double ErrorState::norm() const {
  return std::sqrt(dot(e_varpi, e_varpi) + dot(e_p, e_p));
}

ErrorState make_error_state(std::span<const double> varpi,
                            std::span<const double> p, const CostSet& costs,
                            std::span<const double> z_star) {
  const std::size_t n = costs.size(), m = costs.dim();
  if (varpi.size() != n * m || p.size() != n * m || z_star.size() != m)
    throw Error(ErrorCode::kDimensionMismatch, "error state dimensions");
  ErrorState e{Vector(n * m), Vector(n * m)};
  for (std::size_t i = 0; i < n; ++i) {
    const Vector g = costs.agent(i).gradient(z_star);
    for (std::size_t k = 0; k < m; ++k) {
      e.e_varpi[i * m + k] = varpi[i * m + k] - z_star[k];
      e.e_p[i * m + k] = p[i * m + k] + g[k];
    }
  }
  return e;
}

LyapunovVr::LyapunovVr(const Network& net, std::size_t m,
                       GeneratorConstants consts)
    : n_(net.size()), m_(m), consts_(consts),
      basis_(reduced_basis(net.size())) {
  require_connected(net);
  lr_inverse_ = inverse(reduced_laplacian(net, basis_));
}

double LyapunovVr::operator()(const ErrorState& e) const {
  const std::size_t n = n_, m = m_;
  if (e.e_varpi.size() != n * m || e.e_p.size() != n * m)
    throw Error(ErrorCode::kDimensionMismatch, "error state dimensions");
  // phi = ([r, R]^T (x) I_m) e_varpi, likewise for the p block.
  auto project = [&](const Vector& x, Vector& head, Matrix& tail) {
    head.assign(m, 0.0);
    tail = Matrix(n - 1, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < m; ++k) {
        const double v = x[i * m + k];
        head[k] += basis_.r[i] * v;
        for (std::size_t c = 0; c + 1 < n; ++c) tail(c, k) += basis_.R(i, c) * v;
      }
  };
  Vector ph, qh;
  Matrix pt, qt;
  project(e.e_varpi, ph, pt);
  project(e.e_p, qh, qt);
  double phi2 = dot(ph, ph) + dot(pt.data(), pt.data());
  double weighted = dot(qh, qh);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t a = 0; a + 1 < n; ++a)
      for (std::size_t b = 0; b + 1 < n; ++b)
        weighted += qt(a, k) * lr_inverse_(a, b) * qt(b, k);
  double cross = 0.0;
  for (std::size_t j = 0; j < n * m; ++j) {
    const double s = e.e_varpi[j] + e.e_p[j];
    cross += s * s;
  }
  return 0.5 * consts_.c1 * (phi2 + weighted) + 0.5 * cross;
}

double lyapunov_vr(const ErrorState& e, const Network& net,
                   const GeneratorConstants& consts) {
  const std::size_t n = net.size();
  if (n == 0 || e.e_varpi.size() % n != 0)
    throw Error(ErrorCode::kDimensionMismatch, "error state dimensions");
  return LyapunovVr(net, e.e_varpi.size() / n, consts)(e);
}

MonitorReport envelope_monitor(std::span<const double> times,
                               std::span<const double> er_norms,
                               const PrescribedClock& clock,
                               const GainFunction& alpha,
                               const GeneratorConstants& consts,
                               double slack) {
  if (times.empty() || times.size() != er_norms.size())
    throw Error(ErrorCode::kEmptyTrajectory, "envelope monitor needs samples");
  MonitorReport rep;
  rep.name = "generator_envelope";
  const double e0 = er_norms[0];
  const double log_gain = 0.5 * std::log(consts.c3 / consts.c2);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double e = er_norms[k];
    double ratio = 0.0;
    if (e > 0.0) {
      if (!(e0 > 0.0)) {
        ratio = std::numeric_limits<double>::infinity();
      } else {
        const double decay =
            consts.c_star * gain_time_integral(clock, alpha, times[k]);
        ratio = std::exp(std::log(e) - std::log(e0) - log_gain + decay);
      }
    }
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > 1.0 + slack && rep.first_violation_t < 0.0)
      rep.first_violation_t = times[k];
  }
  rep.pass = rep.first_violation_t < 0.0;
  rep.extras.push_back({"gamma", std::exp(log_gain)});
  rep.extras.push_back({"slack", slack});
  return rep;
}

MonitorReport lyapunov_decrease_check(std::span<const double> times,
                                      std::span<const double> v,
                                      const PrescribedClock& clock,
                                      const GainFunction& alpha,
                                      double c_star, double tol,
                                      double abs_floor) {
  if (times.empty() || times.size() != v.size())
    throw Error(ErrorCode::kEmptyTrajectory, "decrease check needs samples");
  MonitorReport rep;
  rep.name = "generator_lyapunov_decrease";
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double w = alpha.weighted_integral(clock.mu(times[k]),
                                             clock.mu(times[k + 1]));
    const double bound =
        v[k] * std::exp(-2.0 * c_star * w) * (1.0 + tol) + abs_floor;
    const double ratio = bound > 0.0 ? v[k + 1] / bound
                                     : (v[k + 1] > 0.0 ? 2.0 : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    if (ratio > 1.0 && rep.first_violation_t < 0.0)
      rep.first_violation_t = times[k + 1];
  }
  rep.pass = rep.first_violation_t < 0.0;
  return rep;
}

}  // namespace dptco
