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
#include "dptco/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dptco/errors.hpp"

namespace dptco {

namespace {

void require_dim(std::size_t want, std::size_t got, const char* what) {
  if (want != got) {
    std::ostringstream os;
    os << what << ": expected dimension " << want << ", got " << got;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

void require_square(const Matrix& a, std::size_t dim, const char* what) {
  if (a.rows() != dim || a.cols() != dim) {
    std::ostringstream os;
    os << what << " must be " << dim << "x" << dim;
    throw Error(ErrorCode::kDimensionMismatch, os.str());
  }
}

// (z - c)^T A (z - c) and A (z - c), A taken symmetric.
double quad_form(const Matrix& a, std::span<const double> z,
                 const Vector& c, Vector* grad_half) {
  const std::size_t n = c.size();
  Vector d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = z[i] - c[i];
  double q = 0.0;
  if (grad_half) grad_half->assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += a(i, j) * d[j];
    q += d[i] * row;
    if (grad_half) (*grad_half)[i] = row;
  }
  return q;
}

Matrix symmetrized(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

}  // namespace

CostFunction::CostFunction(std::size_t dim, std::vector<QuadraticTerm> quad,
                           std::vector<ExpQuadraticTerm> expq)
    : dim_(dim), quad_(std::move(quad)), expq_(std::move(expq)) {
  if (dim_ == 0) throw Error(ErrorCode::kDegenerateSize, "cost dimension 0");
  if (quad_.empty() && expq_.empty())
    throw Error(ErrorCode::kInvalidArgument, "cost has no terms");
  for (auto& t : quad_) {
    require_square(t.Q, dim_, "quadratic Q");
    require_dim(dim_, t.center.size(), "quadratic center");
    t.Q = symmetrized(t.Q);
  }
  for (auto& t : expq_) {
    require_square(t.P, dim_, "exp-quadratic P");
    require_dim(dim_, t.center.size(), "exp-quadratic center");
    t.P = symmetrized(t.P);
  }
}

CostFunction CostFunction::quadratic(Matrix Q, Vector center, double offset) {
  const std::size_t n = center.size();
  return CostFunction(n, {QuadraticTerm{std::move(Q), std::move(center),
                                        offset}});
}

double CostFunction::value(std::span<const double> z) const {
  require_dim(dim_, z.size(), "cost argument");
  double v = 0.0;
  for (const auto& t : quad_) v += quad_form(t.Q, z, t.center, nullptr) + t.offset;
  for (const auto& t : expq_) v += std::exp(quad_form(t.P, z, t.center, nullptr));
  return v;
}

Vector CostFunction::gradient(std::span<const double> z) const {
  require_dim(dim_, z.size(), "cost argument");
  Vector g(dim_, 0.0), half;
  for (const auto& t : quad_) {
    quad_form(t.Q, z, t.center, &half);
    for (std::size_t i = 0; i < dim_; ++i) g[i] += 2.0 * half[i];
  }
  for (const auto& t : expq_) {
    const double e = std::exp(quad_form(t.P, z, t.center, &half));
    for (std::size_t i = 0; i < dim_; ++i) g[i] += 2.0 * e * half[i];
  }
  return g;
}

Matrix CostFunction::hessian(std::span<const double> z) const {
  require_dim(dim_, z.size(), "cost argument");
  Matrix h(dim_, dim_);
  Vector half;
  for (const auto& t : quad_) h = h + 2.0 * t.Q;
  for (const auto& t : expq_) {
    const double e = std::exp(quad_form(t.P, z, t.center, &half));
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        h(i, j) += e * (2.0 * t.P(i, j) + 4.0 * half[i] * half[j]);
  }
  return h;
}

std::optional<std::pair<double, double>> CostFunction::analytic_constants()
    const {
  if (!purely_quadratic()) return std::nullopt;
  Matrix q(dim_, dim_);
  for (const auto& t : quad_) q = q + t.Q;
  const Vector ev = jacobi_eigen(q).values;
  return std::make_pair(2.0 * ev.front(), 2.0 * ev.back());
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return {Vector(dim, lo), Vector(dim, hi)};
}

CostSet::CostSet(std::vector<CostFunction> agents, std::optional<Box> box)
    : agents_(std::move(agents)), dim_(0) {
  if (agents_.empty())
    throw Error(ErrorCode::kDegenerateSize, "cost set has no agents");
  dim_ = agents_.front().dim();
  for (const auto& f : agents_) require_dim(dim_, f.dim(), "agent cost");
  box_ = box ? *box : Box::cube(dim_, -5.0, 5.0);
  require_dim(dim_, box_.lo.size(), "working box");
  require_dim(dim_, box_.hi.size(), "working box");
  for (std::size_t k = 0; k < dim_; ++k)
    if (!(box_.hi[k] > box_.lo[k]))
      throw Error(ErrorCode::kInvalidArgument, "working box is empty");
}

double CostSet::total_value(std::span<const double> z) const {
  double v = 0.0;
  for (const auto& f : agents_) v += f.value(z);
  return v;
}

Vector grad_sum(const CostSet& costs, std::span<const double> z) {
  require_dim(costs.dim(), z.size(), "grad_sum argument");
  Vector g(costs.dim(), 0.0);
  for (const auto& f : costs.agents()) {
    const Vector gi = f.gradient(z);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
  }
  return g;
}

namespace {

Matrix fd_hessian(const CostSet& costs, const Vector& z) {
  const std::size_t n = z.size();
  const double h = 1e-5 * (1.0 + norm2(z));
  Matrix hess(n, n);
  Vector zp = z, zm = z;
  for (std::size_t j = 0; j < n; ++j) {
    zp[j] = z[j] + h;
    zm[j] = z[j] - h;
    const Vector gp = grad_sum(costs, zp), gm = grad_sum(costs, zm);
    for (std::size_t i = 0; i < n; ++i) hess(i, j) = (gp[i] - gm[i]) / (2 * h);
    zp[j] = zm[j] = z[j];
  }
  return symmetrized(hess);
}

}  // namespace

OptimumCertificate optimum_oracle(const CostSet& costs, double tol,
                                  std::span<const double> z_init) {
  require_dim(costs.dim(), z_init.size(), "optimum_oracle start");
  if (!(tol > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "oracle tolerance must be > 0");
  constexpr long kMaxIter = 10000;
  OptimumCertificate cert{Vector(z_init.begin(), z_init.end()), 0.0, 0};
  Vector g = grad_sum(costs, cert.z);
  cert.grad_norm = norm2(g);
  while (cert.grad_norm > tol) {
    if (cert.iterations >= kMaxIter)
      throw Error(ErrorCode::kNoConvergence,
                  "optimum oracle did not converge in 10^4 iterations");
    Vector step;
    try {
      step = solve(fd_hessian(costs, cert.z), g);
    } catch (const Error&) {
      step = g;
    }
    if (dot(step, g) <= 0.0) step = g;  // not a descent direction
    const double f0 = costs.total_value(cert.z);
    double t = 1.0;
    Vector trial(cert.z.size());
    for (int k = 0; k < 60; ++k) {
      for (std::size_t i = 0; i < trial.size(); ++i)
        trial[i] = cert.z[i] - t * step[i];
      if (costs.total_value(trial) <= f0 - 1e-4 * t * dot(step, g)) break;
      t *= 0.5;
    }
    const Vector g_trial = grad_sum(costs, trial);
    // Near the optimum the Armijo test is lost in round-off of f; accept a
    // step that still reduces the gradient norm.
    if (costs.total_value(trial) > f0 && norm2(g_trial) >= cert.grad_norm) {
      ++cert.iterations;
      break;
    }
    cert.z = trial;
    g = g_trial;
    cert.grad_norm = norm2(g);
    ++cert.iterations;
  }
  if (cert.grad_norm > tol)
    throw Error(ErrorCode::kNoConvergence,
                "optimum oracle stalled above tolerance");
  return cert;
}

CostConstants estimate_constants(const CostFunction& f, const Box& box,
                                 std::size_t samples, std::uint64_t seed) {
  const std::size_t n = f.dim();
  require_dim(n, box.lo.size(), "box");
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (std::size_t k = 0; k < n; ++k) dist.emplace_back(box.lo[k], box.hi[k]);
  std::vector<Vector> pts(std::max<std::size_t>(samples, 2), Vector(n));
  for (auto& p : pts)
    for (std::size_t k = 0; k < n; ++k) p[k] = dist[k](rng);
  // Corners carry the extreme curvature of convex exp terms.
  for (std::size_t c = 0; c < (std::size_t{1} << n) && n <= 10; ++c) {
    Vector p(n);
    for (std::size_t k = 0; k < n; ++k)
      p[k] = (c >> k) & 1 ? box.hi[k] : box.lo[k];
    pts.push_back(std::move(p));
  }
  std::vector<Vector> grads;
  grads.reserve(pts.size());
  for (const auto& p : pts) grads.push_back(f.gradient(p));

  CostConstants out;
  out.rho = std::numeric_limits<double>::infinity();
  out.varrho = 0.0;
  for (std::size_t a = 0; a + 1 < pts.size(); ++a) {
    const std::size_t b = a + 1;
    Vector dx(n), dg(n);
    for (std::size_t k = 0; k < n; ++k) {
      dx[k] = pts[a][k] - pts[b][k];
      dg[k] = grads[a][k] - grads[b][k];
    }
    const double d2 = dot(dx, dx);
    if (d2 <= 0.0) continue;
    out.rho = std::min(out.rho, dot(dg, dx) / d2);
    out.varrho = std::max(out.varrho, norm2(dg) / std::sqrt(d2));
  }
  // Pair quotients only see curvature along sampled directions; the
  // finite-difference Hessian spectrum at each point sees all of them.
  for (const auto& p : pts) {
    const double h = 1e-5 * (1.0 + norm2(p));
    Matrix hess(n, n);
    Vector pp = p, pm = p;
    for (std::size_t j = 0; j < n; ++j) {
      pp[j] = p[j] + h;
      pm[j] = p[j] - h;
      const Vector gp = f.gradient(pp), gm = f.gradient(pm);
      for (std::size_t i = 0; i < n; ++i) hess(i, j) = (gp[i] - gm[i]) / (2 * h);
      pp[j] = pm[j] = p[j];
    }
    const Vector ev = jacobi_eigen(symmetrized(hess)).values;
    out.rho = std::min(out.rho, ev.front());
    out.varrho = std::max(out.varrho, ev.back());
  }
  // Outward rounding so that exact quadratics are bracketed despite the
  // finite-difference error.
  const double pad = 1e-8 * std::max(1.0, out.varrho);
  out.rho -= pad;
  out.varrho += pad;
  return out;
}

CostConstants aggregate_constants(const CostSet& costs, std::size_t samples) {
  CostConstants agg;
  agg.rho = std::numeric_limits<double>::infinity();
  agg.varrho = 0.0;
  agg.analytic = true;
  std::uint64_t seed = 1;
  for (const auto& f : costs.agents()) {
    CostConstants c;
    if (auto a = f.analytic_constants()) {
      c = {a->first, a->second, true};
    } else {
      c = estimate_constants(f, costs.box(), samples, seed);
      agg.analytic = false;
    }
    ++seed;
    agg.rho = std::min(agg.rho, c.rho);
    agg.varrho = std::max(agg.varrho, c.varrho);
  }
  return agg;
}

}  // namespace dptco
