// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "stdg/assembly.hpp"
#include "stdg/fe_space.hpp"
#include "stdg/mesh.hpp"
#include "stdg/quadrature.hpp"

namespace stdg {

namespace {

constexpr double kPi = std::numbers::pi;

using TimeFn = std::function<double(double)>;

// Time factors shared by both examples.  All pieces of the exact solutions
// evolve like e^t, e^t - 1 or e^t - t - 1 (the latter two vanish at t = 0).
const TimeFn kExp = [](double t) { return std::exp(t); };
const TimeFn kExpM1 = [](double t) { return std::expm1(t); };
const TimeFn kExpM1MT = [](double t) { return std::expm1(t) - t; };
const TimeFn kOne = [](double) { return 1.0; };

// ---------------------------------------------------------------------------
// Example 1 fields (interval domain).  Pieces are left-closed in x: on a
// breakpoint the branch to its right applies; all breakpoints are mesh
// vertices, so quadrature points never land on them.

struct Term1d {
  TimeFn eta;
  std::function<double(double)> phi;
};

// chi flips sign at pi/2; u = (e^t - 1) chi cos(x) stays continuous because
// cos vanishes there.
double ex1_chi(double x) { return x < kPi / 2 ? -1.0 : 1.0; }

// Stationary part of v: a hat over (0, 3pi/2) ... 0, x, 2pi - x.
double ex1_psi(double x) {
  if (x < 0.0) return 0.0;
  if (x < kPi) return x;
  return 2.0 * kPi - x;
}

struct Terms1d {
  std::vector<Term1d> u, v, f, g;
};

Terms1d ex1_terms() {
  Terms1d ts;
  ts.u = {{kExpM1, [](double x) { return ex1_chi(x) * std::cos(x); }}};
  ts.v = {{[](double t) { return -(std::expm1(t) - t); },
           [](double x) { return x < 0.0 ? std::sin(x) : 0.0; }},
          {kOne, ex1_psi}};
  // f = d/dt u + d/dx v per smooth piece.
  ts.f = {{kExp, [](double x) { return ex1_chi(x) * std::cos(x); }},
          {[](double t) { return -(std::expm1(t) - t); },
           [](double x) { return x < 0.0 ? std::cos(x) : 0.0; }},
          {kOne, [](double x) {
             if (x < 0.0) return 0.0;
             return x < kPi ? 1.0 : -1.0;
           }}};
  // g = 1_{x<0} d/dt v + 1_{x>0} v + d/dx u; it cancels identically on the
  // time-derivative side.
  ts.g = {{kOne, ex1_psi},
          {kExpM1, [](double x) {
             return x < 0.0 ? 0.0 : -ex1_chi(x) * std::sin(x);
           }}};
  return ts;
}

double eval_terms(const std::vector<Term1d>& ts, double t, double x) {
  double out = 0.0;
  for (const auto& term : ts) out += term.eta(t) * term.phi(x);
  return out;
}

// ---------------------------------------------------------------------------
// Example 2 fields (square domain).  u is scalar, v is a vector field with
// quadrant-wise branches; both halves are glued so that u is continuous and
// v has a continuous normal trace across x = 0 and y = 0.

struct STerm2d {
  TimeFn eta;
  std::function<double(double, double)> phi;
};
struct VTerm2d {
  TimeFn eta;
  std::function<Eigen::Vector2d(double, double)> phi;
};

double ex2_shape_u(double x, double y) {
  const double px = x < 0.0 ? std::cos(kPi * x / 2) : 1.0 - x;
  return px * (1.0 - std::abs(y));
}

Eigen::Vector2d ex2_shape_v(double x, double y) {
  if (x < 0.0) {
    if (y < 0.0)
      return {std::cos(kPi * x / 2) * y, std::sin(kPi * y / 2)};
    return {x + y, -y * y};
  }
  if (y < 0.0) return {x * x + y, 0.0};
  return {y * (1.0 + x), 0.0};
}

double ex2_div_v(double x, double y) {
  if (x < 0.0) {
    if (y < 0.0)
      return -kPi / 2 * std::sin(kPi * x / 2) * y +
             kPi / 2 * std::cos(kPi * y / 2);
    return 1.0 - 2.0 * y;
  }
  return y < 0.0 ? 2.0 * x : y;
}

Eigen::Vector2d ex2_grad_u(double x, double y) {
  const double sy = y < 0.0 ? -1.0 : 1.0;
  if (x < 0.0)
    return {-kPi / 2 * std::sin(kPi * x / 2) * (1.0 - std::abs(y)),
            std::cos(kPi * x / 2) * -sy};
  return {-(1.0 - std::abs(y)), (1.0 - x) * -sy};
}

struct Terms2d {
  std::vector<STerm2d> u, f;
  std::vector<VTerm2d> v, g;
};

Terms2d ex2_terms() {
  Terms2d ts;
  ts.u = {{kExpM1, ex2_shape_u}};
  ts.v = {{kExpM1MT, ex2_shape_v}};
  // f = 1_{x<0} d/dt u + 1_{x>0} u + div v.
  ts.f = {{kExp,
           [](double x, double y) { return x < 0.0 ? ex2_shape_u(x, y) : 0.0; }},
          {kExpM1,
           [](double x, double y) { return x < 0.0 ? 0.0 : ex2_shape_u(x, y); }},
          {kExpM1MT, ex2_div_v}};
  // g = 1_{x<0} d/dt v + 1_{x>0} v + grad u.
  ts.g = {{kExpM1,
           [](double x, double y) {
             return x < 0.0 ? ex2_shape_v(x, y) : Eigen::Vector2d(0, 0);
           }},
          {kExpM1MT,
           [](double x, double y) {
             return x < 0.0 ? Eigen::Vector2d(0, 0) : ex2_shape_v(x, y);
           }},
          {kExpM1, ex2_grad_u}};
  return ts;
}

double eval_terms(const std::vector<STerm2d>& ts, double t, double x,
                  double y) {
  double out = 0.0;
  for (const auto& term : ts) out += term.eta(t) * term.phi(x, y);
  return out;
}

Eigen::Vector2d eval_terms(const std::vector<VTerm2d>& ts, double t, double x,
                           double y) {
  Eigen::Vector2d out(0.0, 0.0);
  for (const auto& term : ts) out += term.eta(t) * term.phi(x, y);
  return out;
}

// ---------------------------------------------------------------------------

// The compatibility residual only concerns rows whose basis functions avoid
// the support of M0 entirely; those rows carry no mass diagonal.
std::function<double()> make_compat(const EvolutionaryProblem& evo) {
  return [ops = evo.ops, x0 = evo.x0, rhs = evo.rhs]() {
    const Eigen::VectorXd r =
        ops->m1 * x0 + ops->a * x0 - rhs(0.0);
    const double scale =
        std::max(1.0, rhs(0.0).lpNorm<Eigen::Infinity>());
    double worst = 0.0;
    for (Eigen::Index i = 0; i < ops->n(); ++i)
      if (ops->m0.coeff(i, i) == 0.0)
        worst = std::max(worst, std::abs(r[i]));
    return worst / scale;
  };
}

}  // namespace

// ---------------------------------------------------------------------------

struct DiscreteProblem::Impl {
  std::string name;
  int dim = 1;
  int k = 1;
  int n_cells = 0;
  int n_comp = 2;
  double t_end = 1.0;
  EvolutionaryProblem evo;
  SpMat gram;
  std::function<double(double, const Eigen::VectorXd&, bool, double)> err2;
  std::function<Eigen::VectorXd(double)> interp;
  std::function<double(int, unsigned)> fd;
  std::function<double()> compat;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> exact_pt;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&,
                                const Eigen::VectorXd&)>
      fe_pt;
};

DiscreteProblem::DiscreteProblem(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

const std::string& DiscreteProblem::name() const { return impl_->name; }
int DiscreteProblem::dim() const { return impl_->dim; }
int DiscreteProblem::degree() const { return impl_->k; }
int DiscreteProblem::n_cells() const { return impl_->n_cells; }
double DiscreteProblem::t_end() const { return impl_->t_end; }
int DiscreteProblem::n_components() const { return impl_->n_comp; }
const EvolutionaryProblem& DiscreteProblem::evo() const { return impl_->evo; }
const SpMat& DiscreteProblem::gram() const { return impl_->gram; }
const SpMat& DiscreteProblem::m0() const { return impl_->evo.ops->m0; }

double DiscreteProblem::exact_err2(double t, const Eigen::VectorXd& c,
                                   bool restricted, double scale) const {
  return impl_->err2(t, c, restricted, scale);
}

SpatialSqError DiscreteProblem::error_sq(double rho_scale) const {
  return [impl = impl_, rho_scale](double t, const Eigen::VectorXd& c,
                                   bool restricted) {
    const double scale = rho_scale == 0.0 ? 1.0 : std::exp(-rho_scale * t);
    return impl->err2(t, c, restricted, scale);
  };
}

Eigen::VectorXd DiscreteProblem::interpolate_exact(double t) const {
  return impl_->interp(t);
}

double DiscreteProblem::fd_residual(int n_samples, unsigned seed) const {
  return impl_->fd(n_samples, seed);
}

double DiscreteProblem::compatibility_residual() const {
  return impl_->compat();
}

Eigen::VectorXd DiscreteProblem::exact_at(double t,
                                          const Eigen::VectorXd& x) const {
  return impl_->exact_pt(t, x);
}

Eigen::VectorXd DiscreteProblem::fe_at(const Eigen::VectorXd& c,
                                       const Eigen::VectorXd& x) const {
  return impl_->fe_pt(c, x);
}

// ---------------------------------------------------------------------------

DiscreteProblem example1(int n_cells, int k) {
  if (n_cells < 6 || n_cells % 6 != 0)
    throw std::invalid_argument(
        "example1: cell count must be a positive multiple of 6 so the "
        "solution-piece interfaces are mesh vertices");
  if (k < 1) throw std::invalid_argument("example1: degree must be >= 1");

  auto impl = std::make_shared<DiscreteProblem::Impl>();
  impl->name = "example1";
  impl->dim = 1;
  impl->k = k;
  impl->n_cells = n_cells;
  impl->n_comp = 2;

  auto mesh = std::make_shared<IntervalMesh>(build_interval_mesh(
      -1.5 * kPi, 1.5 * kPi, n_cells,
      [](double xm) { return xm < 0.0 ? 0 : 1; }));
  auto su = std::make_shared<LagrangeSpace1d>(mesh, k, /*dirichlet=*/true);
  auto sv = std::make_shared<LagrangeSpace1d>(mesh, k, /*dirichlet=*/false);
  const Eigen::Index nu = su->dim(), nv = sv->dim(), n = nu + nv;

  auto ops = std::make_shared<BlockOperator>();
  ops->dim_u = nu;
  ops->dim_v = nv;
  {
    std::vector<Eigen::Triplet<double>> t0, t1, ta, tg;
    const SpMat mu = assemble_mass_1d(*su);
    const SpMat mv = assemble_mass_1d(*sv);
    add_block(t0, mu, 0, 0);
    add_block(t0, assemble_mass_1d(*sv, /*tag=*/0), nu, nu);
    ops->m0 = compose(n, t0);
    add_block(t1, assemble_mass_1d(*sv, /*tag=*/1), nu, nu);
    ops->m1 = compose(n, t1);
    const SpMat c = assemble_deriv_1d(*su, *sv);
    add_block(ta, c, 0, nu);
    add_block(ta, SpMat(c.transpose()), nu, 0, -1.0);
    ops->a = compose(n, ta);
    add_block(tg, mu, 0, 0);
    add_block(tg, mv, nu, nu);
    impl->gram = compose(n, tg);
  }
  impl->evo.ops = ops;
  impl->evo.rho0 = 0.0;

  const auto terms = std::make_shared<const Terms1d>(ex1_terms());

  // Load vectors of the separable right-hand side pieces.
  const auto load_rule = gauss_legendre(k + 3);
  auto load_1d = [&](const LagrangeSpace1d& sp,
                     const std::function<double(double)>& phi) {
    Eigen::MatrixXd val, der;
    sp.tabulate(load_rule->nodes, val, der);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(sp.dim());
    for (int e = 0; e < mesh->n_cells(); ++e) {
      const double h = mesh->cell_size(e), xl = mesh->cell_left(e);
      for (std::size_t p = 0; p < load_rule->nodes.size(); ++p) {
        const double fx = phi(xl + h * load_rule->nodes[p]);
        if (fx == 0.0) continue;
        const double wf = h * load_rule->weights[p] * fx;
        for (int a = 0; a < sp.n_local(); ++a) {
          const int gi = sp.local_to_global(e, a);
          if (gi >= 0) b[gi] += wf * val(a, p);
        }
      }
    }
    return b;
  };

  std::vector<std::pair<TimeFn, Eigen::VectorXd>> rhs_terms;
  for (const auto& term : terms->f) {
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(n);
    vec.head(nu) = load_1d(*su, term.phi);
    rhs_terms.emplace_back(term.eta, std::move(vec));
  }
  for (const auto& term : terms->g) {
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(n);
    vec.segment(nu, nv) = load_1d(*sv, term.phi);
    rhs_terms.emplace_back(term.eta, std::move(vec));
  }
  impl->evo.rhs = [rhs_terms, n](double t) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (const auto& [eta, vec] : rhs_terms) out += eta(t) * vec;
    return out;
  };

  impl->interp = [terms, su, sv, nu, nv](double t) {
    Eigen::VectorXd out(nu + nv);
    out.head(nu) = su->interpolate(
        [&](double x) { return eval_terms(terms->u, t, x); });
    out.segment(nu, nv) = sv->interpolate(
        [&](double x) { return eval_terms(terms->v, t, x); });
    return out;
  };
  impl->evo.x0 = impl->interp(0.0);

  // Error quadrature caches: reference basis table plus exact field values
  // of every separable piece at the mapped Gauss points.
  struct ErrCache {
    std::shared_ptr<const IntervalMesh> mesh;
    std::shared_ptr<const LagrangeSpace1d> su, sv;
    std::vector<double> w;
    Eigen::MatrixXd val;  // shared by both spaces (same reference nodes)
    std::vector<std::pair<TimeFn, Eigen::MatrixXd>> u_terms, v_terms;
  };
  auto cache = std::make_shared<ErrCache>();
  cache->mesh = mesh;
  cache->su = su;
  cache->sv = sv;
  {
    const auto rule = gauss_legendre(k + 3);
    cache->w = rule->weights;
    Eigen::MatrixXd der;
    su->tabulate(rule->nodes, cache->val, der);
    auto field_table = [&](const std::function<double(double)>& phi) {
      Eigen::MatrixXd vals(mesh->n_cells(), rule->nodes.size());
      for (int e = 0; e < mesh->n_cells(); ++e)
        for (std::size_t p = 0; p < rule->nodes.size(); ++p)
          vals(e, p) =
              phi(mesh->cell_left(e) + mesh->cell_size(e) * rule->nodes[p]);
      return vals;
    };
    for (const auto& term : terms->u)
      cache->u_terms.emplace_back(term.eta, field_table(term.phi));
    for (const auto& term : terms->v)
      cache->v_terms.emplace_back(term.eta, field_table(term.phi));
  }

  impl->err2 = [cache, nu](double t, const Eigen::VectorXd& c,
                           bool restricted, double scale) {
    const auto& m = *cache->mesh;
    const int nl = static_cast<int>(cache->val.rows());
    const int nq = static_cast<int>(cache->val.cols());
    std::vector<double> eta_u(cache->u_terms.size()),
        eta_v(cache->v_terms.size());
    for (std::size_t i = 0; i < eta_u.size(); ++i)
      eta_u[i] = scale * cache->u_terms[i].first(t);
    for (std::size_t i = 0; i < eta_v.size(); ++i)
      eta_v[i] = scale * cache->v_terms[i].first(t);

    Eigen::VectorXd cl(nl);
    double acc = 0.0;
    for (int e = 0; e < m.n_cells(); ++e) {
      const double h = m.cell_size(e);
      for (int a = 0; a < nl; ++a) {
        const int gi = cache->su->local_to_global(e, a);
        cl[a] = gi >= 0 ? c[gi] : 0.0;
      }
      for (int p = 0; p < nq; ++p) {
        double diff = cache->val.col(p).dot(cl);
        for (std::size_t i = 0; i < eta_u.size(); ++i)
          diff -= eta_u[i] * cache->u_terms[i].second(e, p);
        acc += h * cache->w[p] * diff * diff;
      }
      if (restricted && m.tags[e] != 0) continue;
      for (int a = 0; a < nl; ++a)
        cl[a] = c[nu + cache->sv->local_to_global(e, a)];
      for (int p = 0; p < nq; ++p) {
        double diff = cache->val.col(p).dot(cl);
        for (std::size_t i = 0; i < eta_v.size(); ++i)
          diff -= eta_v[i] * cache->v_terms[i].second(e, p);
        acc += h * cache->w[p] * diff * diff;
      }
    }
    return acc;
  };

  impl->fd = [terms](int n_samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ut(0.05, 0.95);
    std::uniform_real_distribution<double> ux(-1.5 * kPi, 1.5 * kPi);
    const double margin = 1e-2, h = 1e-5;
    const double breakpoints[] = {0.0, kPi / 2, kPi};
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      double x;
      for (;;) {
        x = ux(rng);
        bool clear = x > -1.5 * kPi + margin && x < 1.5 * kPi - margin;
        for (double b : breakpoints) clear = clear && std::abs(x - b) > margin;
        if (clear) break;
      }
      const double t = ut(rng);
      auto u = [&](double tt, double xx) { return eval_terms(terms->u, tt, xx); };
      auto v = [&](double tt, double xx) { return eval_terms(terms->v, tt, xx); };
      const double dtu = (u(t + h, x) - u(t - h, x)) / (2 * h);
      const double dxu = (u(t, x + h) - u(t, x - h)) / (2 * h);
      const double dtv = (v(t + h, x) - v(t - h, x)) / (2 * h);
      const double dxv = (v(t, x + h) - v(t, x - h)) / (2 * h);
      const double fv = eval_terms(terms->f, t, x);
      const double gv = eval_terms(terms->g, t, x);
      const double ru = std::abs(dtu + dxv - fv);
      const double rv = x < 0.0 ? std::abs(dtv + dxu - gv)
                                : std::abs(v(t, x) + dxu - gv);
      const double scale = std::max({1.0, std::abs(fv), std::abs(gv)});
      worst = std::max(worst, std::max(ru, rv) / scale);
    }
    return worst;
  };

  impl->compat = make_compat(impl->evo);

  impl->exact_pt = [terms](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2);
    out << eval_terms(terms->u, t, x[0]), eval_terms(terms->v, t, x[0]);
    return out;
  };
  impl->fe_pt = [su, sv, nu, nv](const Eigen::VectorXd& c,
                                 const Eigen::VectorXd& x) {
    Eigen::VectorXd out(2);
    out << su->eval(c.head(nu), x[0]), sv->eval(c.segment(nu, nv), x[0]);
    return out;
  };

  return DiscreteProblem(std::move(impl));
}

// ---------------------------------------------------------------------------

DiscreteProblem example2(int n_cells, int k) {
  if (n_cells < 2 || n_cells % 2 != 0)
    throw std::invalid_argument(
        "example2: cell count must be a positive even number so the "
        "interface x = 0 and the crease y = 0 are mesh lines");
  if (k < 1) throw std::invalid_argument("example2: degree must be >= 1");

  auto impl = std::make_shared<DiscreteProblem::Impl>();
  impl->name = "example2";
  impl->dim = 2;
  impl->k = k;
  impl->n_cells = n_cells;
  impl->n_comp = 3;

  auto mesh = std::make_shared<TriMesh>(build_rect_trimesh(
      -1.0, 1.0, -1.0, 1.0, n_cells, n_cells,
      [](const Eigen::Vector2d& c) { return c.x() < 0.0 ? 0 : 1; }));
  auto su = std::make_shared<LagrangeSpace2d>(mesh, k, /*dirichlet=*/true);
  auto sv = std::make_shared<RtSpace2d>(mesh, k - 1);
  const Eigen::Index nu = su->dim(), nv = sv->dim(), n = nu + nv;

  auto ops = std::make_shared<BlockOperator>();
  ops->dim_u = nu;
  ops->dim_v = nv;
  {
    std::vector<Eigen::Triplet<double>> t0, t1, ta, tg;
    add_block(t0, assemble_mass_p2d(*su, /*tag=*/0), 0, 0);
    add_block(t0, assemble_mass_rt2d(*sv, /*tag=*/0), nu, nu);
    ops->m0 = compose(n, t0);
    add_block(t1, assemble_mass_p2d(*su, /*tag=*/1), 0, 0);
    add_block(t1, assemble_mass_rt2d(*sv, /*tag=*/1), nu, nu);
    ops->m1 = compose(n, t1);
    const SpMat c = assemble_div_coupling_2d(*su, *sv);
    add_block(ta, c, 0, nu);
    add_block(ta, SpMat(c.transpose()), nu, 0, -1.0);
    ops->a = compose(n, ta);
    add_block(tg, assemble_mass_p2d(*su), 0, 0);
    add_block(tg, assemble_mass_rt2d(*sv), nu, nu);
    impl->gram = compose(n, tg);
  }
  impl->evo.ops = ops;
  impl->evo.rho0 = 0.0;

  const auto terms = std::make_shared<const Terms2d>(ex2_terms());

  // Shared quadrature data: rule points, physical point table, basis tables.
  const auto rule = tri_quadrature(2 * k + 4);
  std::vector<Eigen::Vector2d> ref_pts(rule->n());
  for (int p = 0; p < rule->n(); ++p) ref_pts[p] = {rule->x[p], rule->y[p]};
  auto phys_pt = [mesh](int t, const Eigen::Vector2d& rp) {
    const auto& tr = mesh->tris[t];
    const Eigen::Vector2d v0 = mesh->vertices[tr.v[0]];
    return Eigen::Vector2d(v0 + (mesh->vertices[tr.v[1]] - v0) * rp.x() +
                           (mesh->vertices[tr.v[2]] - v0) * rp.y());
  };

  struct Tables {
    Eigen::MatrixXd uval[2], vx[2], vy[2];
  };
  auto tables = std::make_shared<Tables>();
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd gx, gy, dv;
    su->tabulate(cls, ref_pts, tables->uval[cls], gx, gy);
    sv->tabulate(cls, ref_pts, tables->vx[cls], tables->vy[cls], dv);
  }

  // Load vectors.
  const double h2 = mesh->hx * mesh->hy;
  auto load_u = [&](const std::function<double(double, double)>& phi) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(su->dim());
    for (int t = 0; t < mesh->n_tris(); ++t) {
      const auto& uval = tables->uval[mesh->tris[t].cls];
      for (int p = 0; p < rule->n(); ++p) {
        const Eigen::Vector2d xp = phys_pt(t, ref_pts[p]);
        const double fx = phi(xp.x(), xp.y());
        if (fx == 0.0) continue;
        const double wf = h2 * rule->w[p] * fx;
        for (int a = 0; a < su->n_local(); ++a) {
          const int gi = su->local_to_global(t, a);
          if (gi >= 0) b[gi] += wf * uval(a, p);
        }
      }
    }
    return b;
  };
  auto load_v =
      [&](const std::function<Eigen::Vector2d(double, double)>& phi) {
        Eigen::VectorXd b = Eigen::VectorXd::Zero(sv->dim());
        for (int t = 0; t < mesh->n_tris(); ++t) {
          const int cls = mesh->tris[t].cls;
          for (int p = 0; p < rule->n(); ++p) {
            const Eigen::Vector2d xp = phys_pt(t, ref_pts[p]);
            const Eigen::Vector2d fx = phi(xp.x(), xp.y());
            const double w = h2 * rule->w[p];
            for (int a = 0; a < sv->n_local(); ++a)
              b[sv->local_to_global(t, a)] +=
                  w * (fx.x() * tables->vx[cls](a, p) +
                       fx.y() * tables->vy[cls](a, p));
          }
        }
        return b;
      };

  std::vector<std::pair<TimeFn, Eigen::VectorXd>> rhs_terms;
  for (const auto& term : terms->f) {
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(n);
    vec.head(nu) = load_u(term.phi);
    rhs_terms.emplace_back(term.eta, std::move(vec));
  }
  for (const auto& term : terms->g) {
    Eigen::VectorXd vec = Eigen::VectorXd::Zero(n);
    vec.segment(nu, nv) = load_v(term.phi);
    rhs_terms.emplace_back(term.eta, std::move(vec));
  }
  impl->evo.rhs = [rhs_terms, n](double t) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (const auto& [eta, vec] : rhs_terms) out += eta(t) * vec;
    return out;
  };

  impl->interp = [terms, su, sv, nu, nv](double t) {
    Eigen::VectorXd out(nu + nv);
    out.head(nu) = su->interpolate([&](const Eigen::Vector2d& p) {
      return eval_terms(terms->u, t, p.x(), p.y());
    });
    out.segment(nu, nv) = sv->interpolate([&](const Eigen::Vector2d& p) {
      return eval_terms(terms->v, t, p.x(), p.y());
    });
    return out;
  };
  impl->evo.x0 = impl->interp(0.0);

  // Exact field values at the mapped quadrature points, one table per
  // separable piece.
  struct ErrCache {
    std::shared_ptr<const TriMesh> mesh;
    std::shared_ptr<const LagrangeSpace2d> su;
    std::shared_ptr<const RtSpace2d> sv;
    std::shared_ptr<const Tables> tables;
    std::vector<double> w;
    std::vector<std::pair<TimeFn, Eigen::MatrixXd>> u_terms;
    std::vector<std::tuple<TimeFn, Eigen::MatrixXd, Eigen::MatrixXd>> v_terms;
    double h2 = 0.0;
  };
  auto cache = std::make_shared<ErrCache>();
  cache->mesh = mesh;
  cache->su = su;
  cache->sv = sv;
  cache->tables = tables;
  cache->w = rule->w;
  cache->h2 = h2;
  for (const auto& term : terms->u) {
    Eigen::MatrixXd vals(mesh->n_tris(), rule->n());
    for (int t = 0; t < mesh->n_tris(); ++t)
      for (int p = 0; p < rule->n(); ++p) {
        const Eigen::Vector2d xp = phys_pt(t, ref_pts[p]);
        vals(t, p) = term.phi(xp.x(), xp.y());
      }
    cache->u_terms.emplace_back(term.eta, std::move(vals));
  }
  for (const auto& term : terms->v) {
    Eigen::MatrixXd vx(mesh->n_tris(), rule->n()), vy(mesh->n_tris(), rule->n());
    for (int t = 0; t < mesh->n_tris(); ++t)
      for (int p = 0; p < rule->n(); ++p) {
        const Eigen::Vector2d xp = phys_pt(t, ref_pts[p]);
        const Eigen::Vector2d fv = term.phi(xp.x(), xp.y());
        vx(t, p) = fv.x();
        vy(t, p) = fv.y();
      }
    cache->v_terms.emplace_back(term.eta, std::move(vx), std::move(vy));
  }

  impl->err2 = [cache, nu](double t, const Eigen::VectorXd& c,
                           bool restricted, double scale) {
    const auto& m = *cache->mesh;
    const int nlu = static_cast<int>(cache->tables->uval[0].rows());
    const int nlv = static_cast<int>(cache->tables->vx[0].rows());
    const int nq = static_cast<int>(cache->w.size());
    std::vector<double> eta_u(cache->u_terms.size()),
        eta_v(cache->v_terms.size());
    for (std::size_t i = 0; i < eta_u.size(); ++i)
      eta_u[i] = scale * cache->u_terms[i].first(t);
    for (std::size_t i = 0; i < eta_v.size(); ++i)
      eta_v[i] = scale * std::get<0>(cache->v_terms[i])(t);

    Eigen::VectorXd cu(nlu), cv(nlv);
    double acc = 0.0;
    for (int e = 0; e < m.n_tris(); ++e) {
      if (restricted && m.tris[e].tag != 0) continue;
      const int cls = m.tris[e].cls;
      for (int a = 0; a < nlu; ++a) {
        const int gi = cache->su->local_to_global(e, a);
        cu[a] = gi >= 0 ? c[gi] : 0.0;
      }
      for (int a = 0; a < nlv; ++a)
        cv[a] = c[nu + cache->sv->local_to_global(e, a)];
      for (int p = 0; p < nq; ++p) {
        double du = cache->tables->uval[cls].col(p).dot(cu);
        double dx = cache->tables->vx[cls].col(p).dot(cv);
        double dy = cache->tables->vy[cls].col(p).dot(cv);
        for (std::size_t i = 0; i < eta_u.size(); ++i)
          du -= eta_u[i] * cache->u_terms[i].second(e, p);
        for (std::size_t i = 0; i < eta_v.size(); ++i) {
          dx -= eta_v[i] * std::get<1>(cache->v_terms[i])(e, p);
          dy -= eta_v[i] * std::get<2>(cache->v_terms[i])(e, p);
        }
        acc += cache->h2 * cache->w[p] * (du * du + dx * dx + dy * dy);
      }
    }
    return acc;
  };

  impl->fd = [terms](int n_samples, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ut(0.05, 0.95);
    std::uniform_real_distribution<double> uxy(-1.0, 1.0);
    const double margin = 1e-2, h = 1e-5;
    auto clear = [&](double z) {
      return std::abs(z) > margin && std::abs(z) < 1.0 - margin;
    };
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
      double x, y;
      do {
        x = uxy(rng);
        y = uxy(rng);
      } while (!clear(x) || !clear(y));
      const double t = ut(rng);
      auto u = [&](double tt, double xx, double yy) {
        return eval_terms(terms->u, tt, xx, yy);
      };
      auto v = [&](double tt, double xx, double yy) {
        return eval_terms(terms->v, tt, xx, yy);
      };
      const double dtu = (u(t + h, x, y) - u(t - h, x, y)) / (2 * h);
      const Eigen::Vector2d gradu{
          (u(t, x + h, y) - u(t, x - h, y)) / (2 * h),
          (u(t, x, y + h) - u(t, x, y - h)) / (2 * h)};
      const Eigen::Vector2d dtv =
          (v(t + h, x, y) - v(t - h, x, y)) / (2 * h);
      const double divv =
          (v(t, x + h, y).x() - v(t, x - h, y).x()) / (2 * h) +
          (v(t, x, y + h).y() - v(t, x, y - h).y()) / (2 * h);
      const double fv = eval_terms(terms->f, t, x, y);
      const Eigen::Vector2d gv = eval_terms(terms->g, t, x, y);
      const double ru = x < 0.0 ? std::abs(dtu + divv - fv)
                                : std::abs(u(t, x, y) + divv - fv);
      const Eigen::Vector2d rvv = x < 0.0 ? (dtv + gradu - gv).eval()
                                          : (v(t, x, y) + gradu - gv).eval();
      const double scale =
          std::max({1.0, std::abs(fv), gv.lpNorm<Eigen::Infinity>()});
      worst =
          std::max(worst, std::max(ru, rvv.lpNorm<Eigen::Infinity>()) / scale);
    }
    return worst;
  };

  impl->compat = make_compat(impl->evo);

  impl->exact_pt = [terms](double t, const Eigen::VectorXd& x) {
    Eigen::VectorXd out(3);
    const Eigen::Vector2d vv = eval_terms(terms->v, t, x[0], x[1]);
    out << eval_terms(terms->u, t, x[0], x[1]), vv.x(), vv.y();
    return out;
  };
  impl->fe_pt = [su, sv, nu, nv](const Eigen::VectorXd& c,
                                 const Eigen::VectorXd& x) {
    Eigen::VectorXd out(3);
    const Eigen::Vector2d p(x[0], x[1]);
    const Eigen::Vector2d vv = sv->eval(c.segment(nu, nv), p);
    out << su->eval(c.head(nu), p), vv.x(), vv.y();
    return out;
  };

  return DiscreteProblem(std::move(impl));
}

DiscreteProblem make_example(int id, int n_cells, int k) {
  if (id == 1) return example1(n_cells, k);
  if (id == 2) return example2(n_cells, k);
  throw std::invalid_argument("unknown example id (use 1 or 2)");
}

}  // namespace stdg
