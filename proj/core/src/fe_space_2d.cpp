// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stdg/fe_space.hpp"
#include "stdg/quadrature.hpp"

namespace stdg {

namespace {

// Scaled vertex offsets of the two element shapes relative to vertex 0, in
// units of the grid spacing.  Class 0 is the lower-right triangle of a
// square cell, class 1 the upper-left one; the shared diagonal runs from
// vertex 0 to vertex 2.
const Eigen::Vector2d kShape[2][3] = {
    {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}},
    {{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}},
};

struct Mono {
  int dx = 0, dy = 0;
  double at(const Eigen::Vector2d& p) const {
    return std::pow(p.x(), dx) * std::pow(p.y(), dy);
  }
  double ddx(const Eigen::Vector2d& p) const {
    return dx == 0 ? 0.0 : dx * std::pow(p.x(), dx - 1) * std::pow(p.y(), dy);
  }
  double ddy(const Eigen::Vector2d& p) const {
    return dy == 0 ? 0.0 : dy * std::pow(p.x(), dx) * std::pow(p.y(), dy - 1);
  }
};

std::vector<Mono> monomials_upto(int k) {
  std::vector<Mono> out;
  for (int d = 0; d <= k; ++d)
    for (int dx = d; dx >= 0; --dx) out.push_back({dx, d - dx});
  return out;
}

// Shifted Legendre values L_0..L_j at s in [0,1] (edge moment weights).
void shifted_legendre(int j, double s, double* out) {
  const double u = 2.0 * s - 1.0;
  out[0] = 1.0;
  if (j >= 1) out[1] = u;
  for (int n = 1; n < j; ++n)
    out[n + 1] = ((2 * n + 1) * u * out[n] - n * out[n - 1]) / (n + 1);
}

double require_square_cells(const TriMesh& mesh, const char* who) {
  if (std::abs(mesh.hx - mesh.hy) > 1e-12 * std::max(mesh.hx, mesh.hy))
    throw std::invalid_argument(std::string(who) + ": needs square grid cells");
  return mesh.hx;
}

}  // namespace

// ---------------------------------------------------------------------------
// Continuous Lagrange elements
// ---------------------------------------------------------------------------

LagrangeSpace2d::LagrangeSpace2d(std::shared_ptr<const TriMesh> mesh,
                                 int degree, bool dirichlet)
    : mesh_(std::move(mesh)), k_(degree), bc_(dirichlet) {
  if (!mesh_) throw std::invalid_argument("lagrange2d: null mesh");
  if (k_ < 1 || k_ > 8) throw std::invalid_argument("lagrange2d: degree");
  h_ = require_square_cells(*mesh_, "lagrange2d");

  // Barycentric lattice |i| = k; i[0] belongs to local vertex 0.
  for (int i0 = k_; i0 >= 0; --i0)
    for (int i1 = k_ - i0; i1 >= 0; --i1)
      lattice_.push_back({i0, i1, k_ - i0 - i1});

  int next = 0;
  vertex_dof_.resize(mesh_->n_vertices());
  for (int v = 0; v < mesh_->n_vertices(); ++v)
    vertex_dof_[v] = (bc_ && mesh_->vertex_on_boundary[v]) ? -1 : next++;
  edge_dof_.resize(mesh_->n_edges());
  for (int e = 0; e < mesh_->n_edges(); ++e) {
    if (k_ < 2 || (bc_ && mesh_->edges[e].on_boundary)) {
      edge_dof_[e] = -1;
    } else {
      edge_dof_[e] = next;
      next += k_ - 1;
    }
  }
  interior_offset_ = next;
  n_interior_ = (k_ - 1) * (k_ - 2) / 2;
  dim_ = next + mesh_->n_tris() * n_interior_;

  // Nodal basis per congruence class via the monomial Vandermonde at the
  // lattice points in scaled local coordinates.
  const auto monos = monomials_upto(k_);
  const int nl = n_local();
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd v(nl, nl);
    for (int a = 0; a < nl; ++a) {
      const auto& idx = lattice_[a];
      const Eigen::Vector2d p =
          (idx[1] * kShape[cls][1] + idx[2] * kShape[cls][2]) /
          static_cast<double>(k_);
      for (int m = 0; m < nl; ++m) v(a, m) = monos[m].at(p);
    }
    coef_[cls] = v.fullPivLu().inverse().transpose();
  }
}

int LagrangeSpace2d::local_to_global(int t, int a) const {
  const auto& tr = mesh_->tris[t];
  const auto& idx = lattice_[a];
  int zero = -1, nz = 0;
  for (int c = 0; c < 3; ++c) {
    if (idx[c] == k_) return vertex_dof_[tr.v[c]];
    if (idx[c] == 0) {
      zero = c;
      ++nz;
    }
  }
  if (nz == 1) {
    // On the edge opposite local vertex `zero`; the two carriers are in
    // ascending local (hence global) order, so the barycentric weight of the
    // larger one is the fraction along the global edge direction.
    const int q = (zero == 2) ? 1 : 2;
    const int base = edge_dof_[tr.edge[zero]];
    if (base < 0) return -1;
    return base + idx[q] - 1;
  }
  // Interior node: count its rank among interior lattice points.
  int rank = 0;
  for (int b = 0; b < a; ++b)
    if (lattice_[b][0] > 0 && lattice_[b][1] > 0 && lattice_[b][2] > 0)
      ++rank;
  return interior_offset_ + t * n_interior_ + rank;
}

void LagrangeSpace2d::tabulate(int cls,
                               const std::vector<Eigen::Vector2d>& ref_pts,
                               Eigen::MatrixXd& val, Eigen::MatrixXd& gx,
                               Eigen::MatrixXd& gy) const {
  const auto monos = monomials_upto(k_);
  const int nl = n_local();
  const int np = static_cast<int>(ref_pts.size());
  Eigen::MatrixXd mv(nl, np), mx(nl, np), my(nl, np);
  for (int p = 0; p < np; ++p) {
    const Eigen::Vector2d xi =
        ref_pts[p].x() * kShape[cls][1] + ref_pts[p].y() * kShape[cls][2];
    for (int m = 0; m < nl; ++m) {
      mv(m, p) = monos[m].at(xi);
      mx(m, p) = monos[m].ddx(xi);
      my(m, p) = monos[m].ddy(xi);
    }
  }
  val = coef_[cls] * mv;
  gx = coef_[cls] * mx / h_;
  gy = coef_[cls] * my / h_;
}

Eigen::Vector2d LagrangeSpace2d::local_coords(int t,
                                              const Eigen::Vector2d& p) const {
  return (p - mesh_->vertices[mesh_->tris[t].v[0]]) / h_;
}

double LagrangeSpace2d::eval(const Eigen::VectorXd& coeff,
                             const Eigen::Vector2d& p) const {
  const int t = mesh_->locate(p);
  const auto monos = monomials_upto(k_);
  const Eigen::Vector2d xi = local_coords(t, p);
  const int cls = mesh_->tris[t].cls;
  double out = 0.0;
  for (int a = 0; a < n_local(); ++a) {
    const int g = local_to_global(t, a);
    if (g < 0) continue;
    double v = 0.0;
    for (int m = 0; m < n_local(); ++m) v += coef_[cls](a, m) * monos[m].at(xi);
    out += coeff[g] * v;
  }
  return out;
}

Eigen::Vector2d LagrangeSpace2d::eval_grad(const Eigen::VectorXd& coeff,
                                           const Eigen::Vector2d& p) const {
  const int t = mesh_->locate(p);
  const auto monos = monomials_upto(k_);
  const Eigen::Vector2d xi = local_coords(t, p);
  const int cls = mesh_->tris[t].cls;
  Eigen::Vector2d out(0.0, 0.0);
  for (int a = 0; a < n_local(); ++a) {
    const int g = local_to_global(t, a);
    if (g < 0) continue;
    double dx = 0.0, dy = 0.0;
    for (int m = 0; m < n_local(); ++m) {
      dx += coef_[cls](a, m) * monos[m].ddx(xi);
      dy += coef_[cls](a, m) * monos[m].ddy(xi);
    }
    out.x() += coeff[g] * dx;
    out.y() += coeff[g] * dy;
  }
  return out / h_;
}

Eigen::VectorXd LagrangeSpace2d::interpolate(
    const std::function<double(const Eigen::Vector2d&)>& f) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim_);
  for (int t = 0; t < mesh_->n_tris(); ++t) {
    const auto& tr = mesh_->tris[t];
    for (int a = 0; a < n_local(); ++a) {
      const int g = local_to_global(t, a);
      if (g < 0) continue;
      const auto& idx = lattice_[a];
      const Eigen::Vector2d x = (idx[0] * mesh_->vertices[tr.v[0]] +
                                 idx[1] * mesh_->vertices[tr.v[1]] +
                                 idx[2] * mesh_->vertices[tr.v[2]]) /
                                static_cast<double>(k_);
      u[g] = f(x);
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// Raviart-Thomas elements
// ---------------------------------------------------------------------------

namespace {

// Spanning fields of RT_j in scaled local coordinates: (m,0) and (0,m) for
// monomials m of degree <= j, then xi * mt for the homogeneous monomials mt
// of degree exactly j.  Component values and the local divergence.
struct RtSpan {
  std::vector<Mono> vx, vy;  // one (possibly zero-)monomial per component
  std::vector<int> kind;     // 0: (m,0), 1: (0,m), 2: xi*mt

  int size() const { return static_cast<int>(kind.size()); }
  void value(int b, const Eigen::Vector2d& p, double& x, double& y) const {
    switch (kind[b]) {
      case 0:
        x = vx[b].at(p);
        y = 0.0;
        break;
      case 1:
        x = 0.0;
        y = vy[b].at(p);
        break;
      default:
        x = vx[b].at(p);
        y = vy[b].at(p);
        break;
    }
  }
  double div_local(int b, const Eigen::Vector2d& p) const {
    switch (kind[b]) {
      case 0:
        return vx[b].ddx(p);
      case 1:
        return vy[b].ddy(p);
      default:
        return vx[b].ddx(p) + vy[b].ddy(p);
    }
  }
};

RtSpan make_rt_span(int j) {
  RtSpan s;
  for (const auto& m : monomials_upto(j)) {
    s.vx.push_back(m);
    s.vy.push_back(Mono{});
    s.kind.push_back(0);
    s.vx.push_back(Mono{});
    s.vy.push_back(m);
    s.kind.push_back(1);
  }
  for (int dx = j; dx >= 0; --dx) {
    // xi * x^dx y^(j-dx): components (x^{dx+1} y^{j-dx}, x^dx y^{j-dx+1}).
    s.vx.push_back({dx + 1, j - dx});
    s.vy.push_back({dx, j - dx + 1});
    s.kind.push_back(2);
  }
  return s;
}

// Local edge le of a class: endpoints in ascending local order and the
// normal obtained by rotating the unit tangent clockwise.
void edge_geometry(int cls, int le, Eigen::Vector2d& start, Eigen::Vector2d& dir,
                   Eigen::Vector2d& normal) {
  const int p = (le == 0) ? 1 : 0;
  const int q = (le == 2) ? 1 : 2;
  start = kShape[cls][p];
  dir = kShape[cls][q] - kShape[cls][p];
  const Eigen::Vector2d t = dir.normalized();
  normal = Eigen::Vector2d(t.y(), -t.x());
}

}  // namespace

RtSpace2d::RtSpace2d(std::shared_ptr<const TriMesh> mesh, int order)
    : mesh_(std::move(mesh)), j_(order) {
  if (!mesh_) throw std::invalid_argument("rt2d: null mesh");
  if (j_ < 0 || j_ > 7) throw std::invalid_argument("rt2d: order out of range");
  h_ = require_square_cells(*mesh_, "rt2d");
  dim_ = mesh_->n_edges() * (j_ + 1) + mesh_->n_tris() * j_ * (j_ + 1);

  const RtSpan span = make_rt_span(j_);
  const int nl = n_local();
  const auto edge_rule = gauss_legendre(j_ + 6);
  const auto bulk_rule = tri_quadrature(2 * j_ + 8);
  const auto interior_monos = monomials_upto(j_ - 1);
  std::vector<double> leg(j_ + 1);

  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nl, nl);
    // Edge moments: mean of (v.n) against shifted Legendre polynomials in
    // the ascending-vertex parametrization; lengths cancel in the mean.
    for (int le = 0; le < 3; ++le) {
      Eigen::Vector2d start, dir, normal;
      edge_geometry(cls, le, start, dir, normal);
      for (std::size_t iq = 0; iq < edge_rule->nodes.size(); ++iq) {
        const double s = edge_rule->nodes[iq];
        const Eigen::Vector2d xi = start + s * dir;
        shifted_legendre(j_, s, leg.data());
        for (int b = 0; b < nl; ++b) {
          double vx, vy;
          span.value(b, xi, vx, vy);
          const double vn = vx * normal.x() + vy * normal.y();
          for (int p = 0; p <= j_; ++p)
            g(le * (j_ + 1) + p, b) += edge_rule->weights[iq] * vn * leg[p];
        }
      }
    }
    // Interior moments: mean of v . (m,0) and v . (0,m) over the element;
    // the reference map has unit scaled Jacobian so the mean is twice the
    // reference-triangle integral.
    const int n_int_base = 3 * (j_ + 1);
    for (int iq = 0; iq < bulk_rule->n(); ++iq) {
      const Eigen::Vector2d ref(bulk_rule->x[iq], bulk_rule->y[iq]);
      const Eigen::Vector2d xi =
          ref.x() * kShape[cls][1] + ref.y() * kShape[cls][2];
      const double w = 2.0 * bulk_rule->w[iq];
      for (int b = 0; b < nl; ++b) {
        double vx, vy;
        span.value(b, xi, vx, vy);
        for (std::size_t mi = 0; mi < interior_monos.size(); ++mi) {
          const double m = interior_monos[mi].at(xi);
          g(n_int_base + 2 * static_cast<int>(mi) + 0, b) += w * vx * m;
          g(n_int_base + 2 * static_cast<int>(mi) + 1, b) += w * vy * m;
        }
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
    if (!lu.isInvertible())
      throw std::runtime_error("rt2d: singular moment matrix");
    coef_[cls] = lu.inverse();
  }
}

int RtSpace2d::local_to_global(int t, int a) const {
  const auto& tr = mesh_->tris[t];
  if (a < 3 * (j_ + 1)) {
    const int le = a / (j_ + 1);
    return tr.edge[le] * (j_ + 1) + a % (j_ + 1);
  }
  const int r = a - 3 * (j_ + 1);
  return mesh_->n_edges() * (j_ + 1) + t * j_ * (j_ + 1) + r;
}

void RtSpace2d::tabulate(int cls, const std::vector<Eigen::Vector2d>& ref_pts,
                         Eigen::MatrixXd& vx, Eigen::MatrixXd& vy,
                         Eigen::MatrixXd& dv) const {
  const RtSpan span = make_rt_span(j_);
  const int nl = n_local();
  const int np = static_cast<int>(ref_pts.size());
  Eigen::MatrixXd sx(nl, np), sy(nl, np), sd(nl, np);
  for (int p = 0; p < np; ++p) {
    const Eigen::Vector2d xi =
        ref_pts[p].x() * kShape[cls][1] + ref_pts[p].y() * kShape[cls][2];
    for (int b = 0; b < nl; ++b) {
      span.value(b, xi, sx(b, p), sy(b, p));
      sd(b, p) = span.div_local(b, xi);
    }
  }
  // Basis i = sum_b coef_(b,i) span_b.
  vx = coef_[cls].transpose() * sx;
  vy = coef_[cls].transpose() * sy;
  dv = coef_[cls].transpose() * sd / h_;
}

Eigen::Vector2d RtSpace2d::eval(const Eigen::VectorXd& coeff,
                                const Eigen::Vector2d& p) const {
  const int t = mesh_->locate(p);
  const int cls = mesh_->tris[t].cls;
  const RtSpan span = make_rt_span(j_);
  const Eigen::Vector2d xi = (p - mesh_->vertices[mesh_->tris[t].v[0]]) / h_;
  Eigen::Vector2d out(0.0, 0.0);
  for (int b = 0; b < n_local(); ++b) {
    double sx, sy;
    span.value(b, xi, sx, sy);
    double amp = 0.0;
    for (int i = 0; i < n_local(); ++i) {
      const int g = local_to_global(t, i);
      amp += coeff[g] * coef_[cls](b, i);
    }
    out.x() += amp * sx;
    out.y() += amp * sy;
  }
  return out;
}

double RtSpace2d::eval_div(const Eigen::VectorXd& coeff,
                           const Eigen::Vector2d& p) const {
  const int t = mesh_->locate(p);
  const int cls = mesh_->tris[t].cls;
  const RtSpan span = make_rt_span(j_);
  const Eigen::Vector2d xi = (p - mesh_->vertices[mesh_->tris[t].v[0]]) / h_;
  double out = 0.0;
  for (int b = 0; b < n_local(); ++b) {
    double amp = 0.0;
    for (int i = 0; i < n_local(); ++i) {
      const int g = local_to_global(t, i);
      amp += coeff[g] * coef_[cls](b, i);
    }
    out += amp * span.div_local(b, xi);
  }
  return out / h_;
}

Eigen::VectorXd RtSpace2d::dof_values(
    int t,
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) const {
  const auto& tr = mesh_->tris[t];
  const Eigen::Vector2d p0 = mesh_->vertices[tr.v[0]];
  const int cls = tr.cls;
  const auto edge_rule = gauss_legendre(j_ + 6);
  const auto bulk_rule = tri_quadrature(2 * j_ + 8);
  const auto interior_monos = monomials_upto(j_ - 1);
  std::vector<double> leg(j_ + 1);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_local());

  for (int le = 0; le < 3; ++le) {
    Eigen::Vector2d start, dir, normal;
    edge_geometry(cls, le, start, dir, normal);
    for (std::size_t iq = 0; iq < edge_rule->nodes.size(); ++iq) {
      const double s = edge_rule->nodes[iq];
      const Eigen::Vector2d x = p0 + h_ * (start + s * dir);
      const Eigen::Vector2d v = f(x);
      const double vn = v.x() * normal.x() + v.y() * normal.y();
      shifted_legendre(j_, s, leg.data());
      for (int p = 0; p <= j_; ++p)
        out[le * (j_ + 1) + p] += edge_rule->weights[iq] * vn * leg[p];
    }
  }
  const int n_int_base = 3 * (j_ + 1);
  for (int iq = 0; iq < bulk_rule->n(); ++iq) {
    const Eigen::Vector2d ref(bulk_rule->x[iq], bulk_rule->y[iq]);
    const Eigen::Vector2d xi =
        ref.x() * kShape[cls][1] + ref.y() * kShape[cls][2];
    const Eigen::Vector2d v = f(p0 + h_ * xi);
    const double w = 2.0 * bulk_rule->w[iq];
    for (std::size_t mi = 0; mi < interior_monos.size(); ++mi) {
      const double m = interior_monos[mi].at(xi);
      out[n_int_base + 2 * static_cast<int>(mi) + 0] += w * v.x() * m;
      out[n_int_base + 2 * static_cast<int>(mi) + 1] += w * v.y() * m;
    }
  }
  return out;
}

Eigen::VectorXd RtSpace2d::interpolate(
    const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim_);
  for (int t = 0; t < mesh_->n_tris(); ++t) {
    const Eigen::VectorXd vals = dof_values(t, f);
    for (int a = 0; a < n_local(); ++a) u[local_to_global(t, a)] = vals[a];
  }
  return u;
}

}  // namespace stdg
