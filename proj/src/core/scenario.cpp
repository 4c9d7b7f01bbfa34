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
#include "dptco/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "dptco/errors.hpp"

namespace dptco {

using Json = nlohmann::json;

const std::vector<std::string>& known_monitor_names() {
  static const std::vector<std::string> names{
      "conservation",    "generator_envelope", "lyapunov_decrease",
      "chain_decay",     "invariant_set",      "strict_envelope",
      "theta_hat_bound", "finite_controls"};
  return names;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

/// Maps a key path onto the source line of its last located key.
class Locator {
 public:
  explicit Locator(const std::string& text) : text_(text) {}

  std::size_t line_of(const std::vector<std::string>& path) const {
    std::size_t pos = 0, found = std::string::npos;
    for (const std::string& key : path) {
      if (!key.empty() && key[0] == '#') continue;
      const std::string needle = "\"" + key + "\"";
      std::size_t p = pos;
      while ((p = text_.find(needle, p)) != std::string::npos) {
        std::size_t q = p + needle.size();
        while (q < text_.size() && std::isspace(static_cast<unsigned char>(text_[q])))
          ++q;
        if (q < text_.size() && text_[q] == ':') break;
        p += needle.size();
      }
      if (p == std::string::npos) break;
      found = p;
      pos = p + needle.size();
    }
    if (found == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(
                   std::count(text_.begin(), text_.begin() + found, '\n'));
  }

 private:
  const std::string& text_;
};

std::string join_path(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& p : path) {
    if (!p.empty() && p[0] == '#') {
      s += "[" + p.substr(1) + "]";
    } else {
      if (!s.empty()) s += ".";
      s += p;
    }
  }
  return s.empty() ? "<root>" : s;
}

/// Cursor into the parsed document that raises line-anchored errors.
class Node {
 public:
  Node(const Json* j, std::vector<std::string> path, const Locator* loc,
       const std::string* source)
      : j_(j), path_(std::move(path)), loc_(loc), source_(source) {}

  [[noreturn]] void fail(const std::string& msg,
                         ErrorCode code = ErrorCode::kConfigError) const {
    const std::size_t line = loc_->line_of(path_);
    std::ostringstream os;
    os << *source_;
    if (line) os << ":" << line;
    os << ": " << join_path(path_) << ": " << msg;
    throw ConfigError(code, os.str(), line);
  }

  const Json& json() const { return *j_; }
  bool is_object() const { return j_->is_object(); }
  bool is_array() const { return j_->is_array(); }
  bool is_string() const { return j_->is_string(); }
  bool is_number() const { return j_->is_number(); }
  bool has(const std::string& key) const {
    return j_->is_object() && j_->contains(key);
  }

  Node at(const std::string& key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    auto p = path_;
    p.push_back(key);
    if (it == j_->end()) Node(j_, p, loc_, source_).fail("missing required key");
    return Node(&*it, p, loc_, source_);
  }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  Node operator[](std::size_t i) const {
    if (!j_->is_array()) fail("expected an array");
    auto p = path_;
    p.push_back("#" + std::to_string(i));
    return Node(&(*j_)[i], p, loc_, source_);
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("number must be finite");
    return v;
  }
  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("must be > 0", ErrorCode::kNonPositiveInput);
    return v;
  }
  std::int64_t integer() const {
    if (!j_->is_number_integer()) fail("expected an integer");
    return j_->get<std::int64_t>();
  }
  bool boolean() const {
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
  }
  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }
  Vector vec(std::size_t expected = 0) const {
    const std::size_t n = size();
    if (expected && n != expected)
      fail("expected " + std::to_string(expected) + " values, got " +
               std::to_string(n),
           ErrorCode::kDimensionMismatch);
    Vector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = (*this)[i].number();
    return v;
  }
  Matrix mat(std::size_t rows, std::size_t cols) const {
    if (size() != rows)
      fail("expected " + std::to_string(rows) + " rows",
           ErrorCode::kDimensionMismatch);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      const Vector row = (*this)[r].vec(cols);
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
  }

  double number_or(const std::string& key, double dflt) const {
    return has(key) ? at(key).number() : dflt;
  }
  double positive_or(const std::string& key, double dflt) const {
    return has(key) ? at(key).positive() : dflt;
  }
  bool bool_or(const std::string& key, bool dflt) const {
    return has(key) ? at(key).boolean() : dflt;
  }
  std::string str_or(const std::string& key, const std::string& dflt) const {
    return has(key) ? at(key).str() : dflt;
  }

 private:
  const Json* j_;
  std::vector<std::string> path_;
  const Locator* loc_;
  const std::string* source_;
};

/// Runs `f`, re-raising library errors as ConfigErrors anchored at `node`.
template <class F>
auto anchored(const Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    node.fail(e.what(), e.code());
  }
}

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line =
        1 + static_cast<std::size_t>(
                std::count(text.begin(), text.begin() + byte, '\n'));
    std::ostringstream os;
    os << source << ":" << line << ": JSON syntax error: " << e.what();
    throw ConfigError(ErrorCode::kParseError, os.str(), line);
  }
}

GainFunction parse_gain(const Node& node) {
  const std::string fam = node.at("family").str();
  const auto family = parse_gain_family(fam);
  if (!family || *family == GainFamily::kDc2)
    node.at("family").fail("unknown gain family '" + fam + "'");
  const Vector params = node.at("params").vec();
  return anchored(node, [&] { return GainFunction::from_params(*family, params); });
}

Vector parse_box_edge(const Node& node, std::size_t dim) {
  if (node.is_number()) return Vector(dim, node.number());
  return node.vec(dim);
}

CostSet parse_costs(const Node& costs, std::size_t n_agents) {
  const std::size_t dim = static_cast<std::size_t>(costs.at("dim").integer());
  if (dim == 0) costs.at("dim").fail("must be >= 1", ErrorCode::kDegenerateSize);
  const Node agents = costs.at("agents");
  if (n_agents && agents.size() != n_agents)
    agents.fail("expected one cost per agent (" + std::to_string(n_agents) +
                    ")",
                ErrorCode::kDimensionMismatch);
  std::vector<CostFunction> fs;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const Node terms = agents[i];
    std::vector<QuadraticTerm> quad;
    std::vector<ExpQuadraticTerm> expq;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const Node term = terms[t];
      const std::string fam = term.at("family").str();
      if (fam == "quadratic") {
        quad.push_back({term.at("Q").mat(dim, dim), term.at("center").vec(dim),
                        term.number_or("offset", 0.0)});
      } else if (fam == "exp_quadratic") {
        expq.push_back({term.at("P").mat(dim, dim), term.at("center").vec(dim)});
      } else {
        term.at("family").fail("unknown cost family '" + fam + "'");
      }
    }
    if (quad.empty() && expq.empty()) terms.fail("cost has no terms");
    fs.push_back(anchored(terms, [&] {
      return CostFunction(dim, std::move(quad), std::move(expq));
    }));
  }
  std::optional<Box> box;
  if (costs.has("box")) {
    const Node b = costs.at("box");
    box = Box{parse_box_edge(b.at("lo"), dim), parse_box_edge(b.at("hi"), dim)};
    for (std::size_t k = 0; k < dim; ++k)
      if (!(box->lo[k] < box->hi[k])) b.fail("box needs lo < hi");
  }
  return anchored(costs, [&] { return CostSet(std::move(fs), box); });
}

void parse_optimum_options(const Node& costs, std::size_t dim, Vector* z_init,
                           double* tol) {
  if (!costs.has("optimum")) return;
  const Node o = costs.at("optimum");
  if (tol && o.has("tol")) *tol = o.at("tol").positive();
  if (z_init && o.has("z_init")) *z_init = o.at("z_init").vec(dim);
}

Network parse_network(const Node& net) {
  const std::int64_t n = net.at("agents").integer();
  if (n < 1) net.at("agents").fail("need at least one agent",
                                   ErrorCode::kDegenerateSize);
  const std::string topo = net.str_or("topology", "edges");
  if (topo == "ring")
    return anchored(net, [&] { return ring_network(static_cast<std::size_t>(n)); });
  if (topo != "edges") net.at("topology").fail("expected 'ring' or 'edges'");
  const Node edges = net.at("edges");
  std::vector<Edge> list;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const Node ed = edges[e];
    const std::size_t k = ed.size();
    if (k != 2 && k != 3) ed.fail("edge is [i, j] or [i, j, w]");
    const std::int64_t i = ed[0].integer(), j = ed[1].integer();
    if (i < 0 || j < 0) ed.fail("negative node index", ErrorCode::kInvalidArgument);
    list.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                    k == 3 ? ed[2].number() : 1.0});
  }
  return anchored(edges, [&] {
    return build_network(static_cast<std::size_t>(n), list);
  });
}

/// Per-agent vectors: either one list broadcast to all agents or N lists.
std::vector<Vector> per_agent(const Node& node, std::size_t n_agents,
                              std::size_t width) {
  if (node.size() > 0 && node[0].is_number())
    return std::vector<Vector>(n_agents, node.vec(width));
  if (node.size() != n_agents)
    node.fail("expected one entry per agent", ErrorCode::kDimensionMismatch);
  std::vector<Vector> out;
  for (std::size_t i = 0; i < n_agents; ++i) out.push_back(node[i].vec(width));
  return out;
}

Vector per_agent_scalar(const Node& node, std::size_t n_agents) {
  if (node.is_number()) return Vector(n_agents, node.number());
  return node.vec(n_agents);
}

Vector flatten(const std::vector<Vector>& vs) {
  Vector out;
  for (const auto& v : vs) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string describe(const CriterionReport& r) {
  std::ostringstream os;
  os.precision(6);
  os << "worst relative slack " << r.worst_margin << " at s=" << r.worst_s;
  if (r.coupling_checked)
    os << "; coupling slack " << r.coupling_worst_margin << " at s="
       << r.coupling_worst_s;
  return os.str();
}

void gate(Scenario& sc, const Node& anchor, const std::string& name,
          const CriterionReport& rep, const std::string& statement) {
  CriterionEntry e{name, rep, false, statement + "; " + describe(rep)};
  if (!rep.pass) {
    if (!sc.acknowledge_override)
      anchor.fail(name + " criterion violated: " + e.detail +
                      " (set \"acknowledge_criteria_override\": true to run "
                      "anyway)",
                  ErrorCode::kCriterionViolation);
    e.acknowledged = true;
    sc.overrides_used.push_back(name + " criterion violated but acknowledged");
  }
  sc.criteria.push_back(std::move(e));
}

void parse_chain(Scenario& sc, const Node& ctrl, int order, double mu0,
                 double mu_guard) {
  CoupledSystem& sys = sc.sys;
  Vector K;
  if (ctrl.has("K") && !ctrl.at("K").is_string()) {
    K = ctrl.at("K").vec(static_cast<std::size_t>(order - 1));
  } else if (ctrl.has("K") && ctrl.at("K").str() != "auto") {
    ctrl.at("K").fail("expected \"auto\" or a list of m-1 gains");
  }
  std::optional<Matrix> Q;
  if (ctrl.has("Q")) {
    const std::size_t d = static_cast<std::size_t>(order - 1);
    Q = ctrl.at("Q").mat(d, d);
  }
  const double v = ctrl.at("v").positive();
  const GainFunction alpha_x = parse_gain(ctrl.at("alpha_x"));
  std::optional<GainFunction> alpha_s;
  if (ctrl.has("alpha_s")) {
    const Node as = ctrl.at("alpha_s");
    if (as.is_string()) {
      if (as.str() != "auto_dc2") as.fail("expected \"auto_dc2\" or a gain");
    } else {
      alpha_s = parse_gain(as);
    }
  }
  ChainControllerConfig cfg = anchored(ctrl, [&] {
    return make_chain_config(order, sys.n, K, Q, v, alpha_x, alpha_s, mu0,
                             mu_guard);
  });
  cfg.psi = anchored(ctrl, [&] {
    return parse_psi_kind(ctrl.str_or("psi", "zero"));
  });
  cfg.psi_scale = ctrl.number_or("psi_scale", 1.0);

  const auto grid = log_grid(mu0, mu_guard);
  const auto dc1 = GrowthCriterion::chain_dc1(cfg.v1, cfg.v2,
                                              sc.gen_constants.c_star,
                                              sys.alpha);
  gate(sc, ctrl.at("alpha_x"), "chain_dc1",
       check_growth_criterion(cfg.alpha_x, dc1, grid),
       "dalpha_x/ds <= v1/(2 v2) s^-2 alpha_x^2 and alpha_x <= (c*/v1) alpha");
  CriterionReport dc2;
  dc2.pass = !cfg.alpha_s_override;
  dc2.worst_margin = dc2.pass ? 0.0 : -1.0;
  gate(sc, ctrl.has("alpha_s") ? ctrl.at("alpha_s") : ctrl, "chain_dc2", dc2,
       dc2.pass ? "alpha_s follows the DC2 formula"
                : "alpha_s is user-supplied and bypasses the DC2 formula");
  sys.chain = std::move(cfg);
}

void parse_strict(Scenario& sc, const Node& ctrl, const Node& agents,
                  int order, double mu0, double mu_guard) {
  CoupledSystem& sys = sc.sys;
  const std::size_t N = sys.n_agents(), n = sys.n;
  const double l = ctrl.positive_or("l", 1.0);
  StrictFeedbackConfig cfg;
  if (ctrl.has("raw")) {
    const Node raw = ctrl.at("raw");
    cfg = anchored(raw, [&] {
      return raw_parameters(order, n, l,
                            raw.at("c").vec(static_cast<std::size_t>(order)),
                            raw.at("upsilon").vec(static_cast<std::size_t>(order - 1)),
                            raw.at("sigma").positive());
    });
    sc.overrides_used.push_back(
        "strict-feedback gains given raw instead of through the recipe");
  } else {
    const Node rec = ctrl.at("recipe");
    cfg = anchored(rec, [&] {
      return select_parameters(
          order, n, l, rec.at("sigma_prime").number(),
          rec.at("rho").vec(static_cast<std::size_t>(order - 1)),
          rec.at("c_bar").vec(static_cast<std::size_t>(order)),
          rec.at("upsilon_bar").vec(static_cast<std::size_t>(order - 1)));
    });
  }
  cfg.alpha_xi = parse_gain(ctrl.at("alpha_xi"));
  cfg.mu_guard = mu_guard;
  if (ctrl.has("phi")) {
    const Node phi = ctrl.at("phi");
    if (phi.is_string()) {
      const PhiKind k = anchored(phi, [&] { return parse_phi_kind(phi.str()); });
      cfg.phi.assign(order - 1, k);
    } else {
      if (phi.size() != static_cast<std::size_t>(order - 1))
        phi.fail("expected m-1 stage nonlinearities",
                 ErrorCode::kDimensionMismatch);
      for (std::size_t q = 0; q < phi.size(); ++q)
        cfg.phi[q] = anchored(phi[q], [&] { return parse_phi_kind(phi[q].str()); });
    }
  }

  const auto grid = log_grid(mu0, mu_guard);
  const int L2 = static_cast<int>(std::lround(cfg.L[1]));
  const auto crit =
      GrowthCriterion::strict_dc_xi(sc.gen_constants.c_star, L2, sys.alpha);
  gate(sc, ctrl.at("alpha_xi"), "strict_dc_xi",
       check_growth_criterion(cfg.alpha_xi, crit, grid),
       "dalpha_xi/ds <= s^-2 alpha_xi^2 and alpha_xi <= c*/(2 L2) alpha");

  const Vector theta = per_agent_scalar(ctrl.at("theta_true"), N);
  const Vector theta_hat0 =
      ctrl.has("theta_hat0") ? per_agent_scalar(ctrl.at("theta_hat0"), N)
                             : Vector(N, 0.0);
  const std::string xi0 = ctrl.str_or("xi_f0", "rest");
  if (xi0 != "rest" && xi0 != "zero")
    ctrl.at("xi_f0").fail("expected \"rest\" or \"zero\"");
  sys.strict = cfg;
  const double mu_start = mu0;
  for (std::size_t i = 0; i < N; ++i) {
    AgentSpec& a = sys.agents[i];
    a.theta_true = theta[i];
    a.ctrl0.assign(cfg.ctrl_dim(), 0.0);
    a.ctrl0[0] = theta_hat0[i];
    if (xi0 == "zero") continue;
    // Filters start at rest: xi_qf(t0) = xi_{q-1}(t0), resolved stage by stage.
    Vector ref(sys.varpi0.begin() + i * n, sys.varpi0.begin() + (i + 1) * n);
    ref = formation_offset_wrap(ref, a.offset);
    std::span<double> xf(a.ctrl0.data() + 1, cfg.ctrl_dim() - 1);
    for (int q = 2; q <= order; ++q) {
      const VirtualControls vc = anchored(agents, [&] {
        return virtual_controls(a.x0, ref, theta_hat0[i], xf, mu_start, cfg);
      });
      std::copy_n(vc.xi.begin() + (q - 2) * n, n, xf.begin() + (q - 2) * n);
    }
  }
}

void parse_agents(Scenario& sc, const Node& agents, double mu0,
                  double mu_guard) {
  CoupledSystem& sys = sc.sys;
  const std::size_t N = sys.n_agents();
  sys.plant = anchored(agents, [&] {
    return parse_plant_kind(agents.str_or("plant", "none"));
  });
  if (sys.plant == PlantKind::kNone) return;
  sys.n = sys.costs.dim();
  const std::int64_t order = sys.plant == PlantKind::kEulerLagrange
                                 ? 2
                                 : agents.at("order").integer();
  if (order < 2) agents.at("order").fail("order must be >= 2",
                                         ErrorCode::kInvalidArgument);
  sys.order = static_cast<int>(order);
  const auto x0 = per_agent(agents.at("x0"), N,
                            static_cast<std::size_t>(order) * sys.n);
  std::vector<Vector> offsets(N);
  if (agents.has("offsets")) offsets = per_agent(agents.at("offsets"), N, sys.n);
  sys.agents.assign(N, AgentSpec{});
  for (std::size_t i = 0; i < N; ++i) {
    sys.agents[i].x0 = x0[i];
    sys.agents[i].offset = offsets[i];
  }

  const Node ctrl = agents.at("controller");
  const std::string kind = ctrl.at("type").str();
  if (sys.plant == PlantKind::kStrictFeedback) {
    if (kind != "strict_feedback")
      ctrl.at("type").fail("strict-feedback plants need the strict_feedback "
                           "controller");
    parse_strict(sc, ctrl, agents, sys.order, mu0, mu_guard);
  } else {
    if (kind != "chain")
      ctrl.at("type").fail("chain and Euler-Lagrange plants need the chain "
                           "controller");
    parse_chain(sc, ctrl, sys.order, mu0, mu_guard);
    for (auto& a : sys.agents) a.ctrl0.clear();
  }

  if (sys.plant == PlantKind::kEulerLagrange) {
    if (sys.n != 2) agents.fail("the two-link arm needs a 2-dimensional cost",
                                ErrorCode::kDimensionMismatch);
    if (agents.has("el")) {
      const Node el = agents.at("el");
      if (el.has("theta")) {
        const Vector th = el.at("theta").vec(6);
        std::copy(th.begin(), th.end(), sys.el_true.theta.begin());
      }
      sys.el_true.g = el.number_or("g", sys.el_true.g);
      sys.el_nominal = sys.el_true;
      if (el.has("nominal_theta")) {
        const Vector th = el.at("nominal_theta").vec(6);
        std::copy(th.begin(), th.end(), sys.el_nominal.theta.begin());
      } else {
        const double s = el.positive_or("nominal_scale", 1.0);
        for (double& t : sys.el_nominal.theta) t *= s;
      }
    } else {
      sys.el_nominal = sys.el_true;
    }
  }
}

void parse_solver(Scenario& sc, const Node& s) {
  SolverSettings& st = sc.solver;
  const std::string method = s.str_or("method", "rk45");
  if (method == "rk4") {
    st.method = SolverMethod::kRk4;
  } else if (method == "rk45") {
    st.method = SolverMethod::kRk45;
  } else {
    s.at("method").fail("expected \"rk4\" or \"rk45\"");
  }
  st.dt = s.positive_or("dt", st.dt);
  st.abs_tol = s.positive_or("abs_tol", st.abs_tol);
  st.rel_tol = s.positive_or("rel_tol", st.rel_tol);
  st.dt_max = s.positive_or("dt_max", st.dt_max);
  st.ceiling_coef = s.positive_or("ceiling_coef", st.ceiling_coef);
  if (s.has("max_steps")) st.max_steps = static_cast<long>(s.at("max_steps").integer());
  if (s.has("log_stride")) st.log_stride = static_cast<long>(s.at("log_stride").integer());
  anchored(s, [&] { st.validate(); });
}

void parse_monitors(Scenario& sc, const Node& root) {
  std::vector<std::string> defaults{"conservation", "generator_envelope"};
  switch (sc.sys.plant) {
    case PlantKind::kChain:
    case PlantKind::kEulerLagrange:
      defaults.insert(defaults.end(), {"chain_decay", "finite_controls"});
      break;
    case PlantKind::kStrictFeedback:
      defaults.insert(defaults.end(), {"invariant_set", "strict_envelope",
                                       "theta_hat_bound", "finite_controls"});
      break;
    case PlantKind::kNone:
      break;
  }
  if (!root.has("monitors")) {
    for (const auto& d : defaults) sc.monitors.push_back({d});
    return;
  }
  const Node mons = root.at("monitors");
  const auto& known = known_monitor_names();
  for (std::size_t k = 0; k < mons.size(); ++k) {
    const Node m = mons[k];
    MonitorRequest req;
    if (m.is_string()) {
      req.name = m.str();
    } else {
      req.name = m.at("name").str();
      req.slack = m.number_or("slack", -1.0);
      req.tol = m.number_or("tol", -1.0);
      req.h = m.number_or("h", -1.0);
    }
    if (std::find(known.begin(), known.end(), req.name) == known.end())
      m.fail("unknown monitor '" + req.name + "'");
    for (const auto& prev : sc.monitors)
      if (prev.name == req.name) m.fail("monitor listed twice");
    const bool needs_chain = req.name == "chain_decay";
    const bool needs_strict = req.name == "invariant_set" ||
                              req.name == "strict_envelope" ||
                              req.name == "theta_hat_bound";
    if (needs_chain && !sc.sys.chain)
      m.fail("chain_decay needs a chain controller");
    if (needs_strict && !sc.sys.strict)
      m.fail(req.name + " needs a strict-feedback controller");
    if (req.name == "finite_controls" && sc.sys.plant == PlantKind::kNone)
      m.fail("finite_controls needs agents");
    sc.monitors.push_back(req);
  }
}

}  // namespace

CostSet parse_cost_section(const std::string& text, const std::string& source,
                           Vector* z_init, double* tol) {
  const Json doc = parse_json(text, source);
  const Locator loc(text);
  const Node root(&doc, {}, &loc, &source);
  const Node costs = root.at("costs");
  CostSet set = parse_costs(costs, 0);
  if (z_init) *z_init = Vector(set.dim(), 0.0);
  if (tol) *tol = Scenario{}.optimum_tol;
  parse_optimum_options(costs, set.dim(), z_init, tol);
  return set;
}

Scenario parse_scenario(const std::string& text, const std::string& source,
                        const ScenarioOverrides& ov) {
  const Json doc = parse_json(text, source);
  const Locator loc(text);
  const Node root(&doc, {}, &loc, &source);
  if (!root.is_object()) root.fail("scenario must be a JSON object");

  Scenario sc;
  sc.source = source;
  sc.hash = fnv1a_hex(text);
  sc.name = root.str_or("name", "scenario");
  sc.acknowledge_override = root.bool_or("acknowledge_criteria_override", false);
  if (root.has("seed")) {
    const std::int64_t s = root.at("seed").integer();
    if (s < 0) root.at("seed").fail("seed must be >= 0");
    sc.seed = static_cast<std::uint64_t>(s);
  }
  if (ov.seed) sc.seed = *ov.seed;
  CoupledSystem& sys = sc.sys;

  // clock
  const Node clock = root.at("clock");
  double guard = clock.number_or("guard_frac", 0.999);
  if (ov.guard_frac) guard = *ov.guard_frac;
  if (!(guard > 0.0 && guard < 1.0))
    clock.fail("guard_frac must lie in (0, 1)");
  sys.clock = PrescribedClock(clock.number_or("t0", 0.0),
                              clock.at("T").positive(), guard);
  const double mu0 = sys.clock.mu0();
  // Small headroom so evaluation exactly at the guard time never trips the
  // controllers' own guard through rounding.
  const double mu_guard = sys.clock.mu_guard() * (1.0 + 1e-9);

  // network
  const Node net = root.at("network");
  sys.net = parse_network(net);
  try {
    const ConnectivityCertificate cert = require_connected(sys.net);
    sc.lambda2 = cert.lambda2;
  } catch (const DisconnectedError& e) {
    net.fail(e.what(), ErrorCode::kDisconnected);
  }
  sc.lambda_n = sys.net.lambda_n();
  const std::size_t N = sys.n_agents();
  if (N < 2) net.at("agents").fail("the generator needs at least two agents",
                                   ErrorCode::kDegenerateSize);

  // costs
  const Node costs = root.at("costs");
  sys.costs = parse_costs(costs, N);
  const std::size_t m = sys.costs.dim();
  sc.z_init = Vector(m, 0.0);
  parse_optimum_options(costs, m, &sc.z_init, &sc.optimum_tol);
  if (costs.has("constant_samples")) {
    const std::int64_t s = costs.at("constant_samples").integer();
    if (s < 2) costs.at("constant_samples").fail("need at least 2 samples");
    sc.constant_samples = static_cast<std::size_t>(s);
  }
  sc.cost_constants = anchored(costs, [&] {
    return aggregate_constants(sys.costs, sc.constant_samples);
  });
  sc.gen_constants = anchored(costs, [&] {
    return generator_constants(sc.cost_constants.rho, sc.cost_constants.varrho,
                               sc.lambda2, sc.lambda_n);
  });
  if (!sc.cost_constants.analytic)
    sc.warnings.push_back(
        "cost constants estimated by sampling on the declared box");

  // gains
  const Node gains = root.at("gains");
  const Node alpha_node = gains.at("alpha");
  sc.alpha_requested = parse_gain(alpha_node);
  sys.alpha = sc.alpha_requested;
  const double c_star = sc.gen_constants.c_star;
  if (gains.bool_or("raise_to_criterion", false)) {
    if (sys.alpha.family() != GainFamily::kLinear)
      gains.at("raise_to_criterion").fail(
          "raise_to_criterion applies to the linear family only");
    const double k_min = 2.0 / c_star;
    if (sys.alpha.params()[0] < k_min) {
      sys.alpha = GainFunction::linear(k_min);
      sc.alpha_raised = true;
    }
  }
  if (!sys.alpha.class_k_infinity())
    alpha_node.fail("generator gain must be class K-infinity");
  const auto grid = log_grid(mu0, mu_guard);
  gate(sc, alpha_node, "generator",
       check_growth_criterion(sys.alpha, GrowthCriterion::generator(c_star), grid),
       "dalpha/ds <= (c*/2) s^-2 alpha^2; linear gains need k >= 2/c* = " +
           std::to_string(2.0 / c_star));

  // generator initial state
  const Node gen = root.has("generator") ? root.at("generator") : root;
  if (gen.has("varpi0")) {
    sys.varpi0 = flatten(per_agent(gen.at("varpi0"), N, m));
  } else {
    sys.varpi0.assign(N * m, 0.0);
  }
  const std::string p0 = gen.str_or("p0", "zeros");
  if (p0 == "zeros") {
    sys.p0 = init_p(N, m, InitPMode::kZeros);
  } else if (p0 == "random_zero_sum") {
    std::uint64_t s = sc.seed;
    if (gen.has("p0_seed")) s = static_cast<std::uint64_t>(gen.at("p0_seed").integer());
    sys.p0 = init_p(N, m, InitPMode::kRandomZeroSum, s);
  } else {
    gen.at("p0").fail("expected \"zeros\" or \"random_zero_sum\"");
  }

  // agents and controllers
  if (root.has("agents")) parse_agents(sc, root.at("agents"), mu0, mu_guard);

  // disturbance
  if (root.has("disturbance")) {
    const Node d = root.at("disturbance");
    sys.disturbance.kind = anchored(d, [&] {
      return parse_disturbance_kind(d.str_or("kind", "none"));
    });
    sys.disturbance.amplitude = d.number_or("amplitude", 0.0);
    if (sys.disturbance.amplitude < 0.0) d.at("amplitude").fail("must be >= 0");
    sys.disturbance.frequency = d.positive_or("frequency", 1.0);
    sys.disturbance.seed = sc.seed;
    if (d.has("seed") && !ov.seed)
      sys.disturbance.seed = static_cast<std::uint64_t>(d.at("seed").integer());
  }

  if (root.has("solver")) parse_solver(sc, root.at("solver"));
  parse_monitors(sc, root);
  anchored(root, [&] { sys.validate(); });
  return sc;
}

Scenario load_scenario(const std::string& path, const ScenarioOverrides& ov) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open scenario " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path, ov);
}

}  // namespace dptco
