// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "stdg/assembly.hpp"
#include "stdg/fe_space.hpp"
#include "stdg/mesh.hpp"
#include "stdg/quadrature.hpp"

using namespace stdg;

namespace {

std::shared_ptr<const IntervalMesh> unit_interval(int n) {
  return std::make_shared<IntervalMesh>(
      build_interval_mesh(0.0, 1.0, n, nullptr));
}

std::shared_ptr<const TriMesh> unit_square_mesh(int n) {
  return std::make_shared<TriMesh>(
      build_rect_trimesh(-1.0, 1.0, -1.0, 1.0, n, n, nullptr));
}

// Reference coordinates of a physical point inside triangle t.
Eigen::Vector2d ref_coords(const TriMesh& mesh, int t,
                           const Eigen::Vector2d& p) {
  const auto& tr = mesh.tris[t];
  const Eigen::Vector2d xi = (p - mesh.vertices[tr.v[0]]) / mesh.hx;
  if (tr.cls == 0) return {xi.x() - xi.y(), xi.y()};
  return {xi.y() - xi.x(), xi.x()};
}

// Evaluate a Lagrange function restricted to one specific triangle (the
// plain eval() would pick a triangle itself; this pins the side).
double eval_on_tri(const LagrangeSpace2d& sp, const Eigen::VectorXd& c, int t,
                   const Eigen::Vector2d& p) {
  Eigen::MatrixXd val, gx, gy;
  sp.tabulate(sp.mesh().tris[t].cls, {ref_coords(sp.mesh(), t, p)}, val, gx,
              gy);
  double out = 0.0;
  for (int a = 0; a < sp.n_local(); ++a) {
    const int g = sp.local_to_global(t, a);
    if (g >= 0) out += c[g] * val(a, 0);
  }
  return out;
}

Eigen::Vector2d rt_eval_on_tri(const RtSpace2d& sp, const Eigen::VectorXd& c,
                               int t, const Eigen::Vector2d& p) {
  Eigen::MatrixXd vx, vy, dv;
  sp.tabulate(sp.mesh().tris[t].cls, {ref_coords(sp.mesh(), t, p)}, vx, vy,
              dv);
  Eigen::Vector2d out(0.0, 0.0);
  for (int a = 0; a < sp.n_local(); ++a) {
    const int g = sp.local_to_global(t, a);
    out.x() += c[g] * vx(a, 0);
    out.y() += c[g] * vy(a, 0);
  }
  return out;
}

}  // namespace

TEST_CASE("interval mesh: geometry and tags") {
  const auto mesh = build_interval_mesh(
      -2.0, 2.0, 8, [](double x) { return x < 0.0 ? 7 : 3; });
  CHECK(mesh.n_cells() == 8);
  CHECK(mesh.vertices.front() == -2.0);
  CHECK(mesh.vertices.back() == 2.0);
  CHECK(mesh.cell_size(3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mesh.tags[0] == 7);
  CHECK(mesh.tags[3] == 7);
  CHECK(mesh.tags[4] == 3);
  CHECK_THROWS_AS(build_interval_mesh(1.0, 0.0, 4, nullptr),
                  std::invalid_argument);
}

TEST_CASE("1d lagrange: linear mass matrix has the classic tridiagonal form") {
  const auto mesh = unit_interval(4);
  LagrangeSpace1d sp(mesh, 1, false);
  CHECK(sp.dim() == 5);
  const Eigen::MatrixXd m = Eigen::MatrixXd(assemble_mass_1d(sp));
  const double h = 0.25;
  CHECK(m(0, 0) == doctest::Approx(h / 3).epsilon(1e-14));
  CHECK(m(1, 1) == doctest::Approx(2 * h / 3).epsilon(1e-14));
  CHECK(m(1, 2) == doctest::Approx(h / 6).epsilon(1e-14));
  CHECK(m(4, 4) == doctest::Approx(h / 3).epsilon(1e-14));
  CHECK(m(0, 2) == 0.0);
  CHECK(m.sum() == doctest::Approx(1.0).epsilon(1e-14));

  // Indicator mass over the left half only.
  const auto tagged = std::make_shared<IntervalMesh>(build_interval_mesh(
      0.0, 1.0, 4, [](double x) { return x < 0.5 ? 0 : 1; }));
  LagrangeSpace1d tsp(tagged, 1, false);
  const Eigen::MatrixXd mh = Eigen::MatrixXd(assemble_mass_1d(tsp, 0));
  CHECK(mh(0, 0) == doctest::Approx(h / 3).epsilon(1e-14));
  CHECK(mh(2, 2) == doctest::Approx(h / 3).epsilon(1e-14));  // half support
  CHECK(mh(3, 3) == 0.0);
  CHECK(mh.sum() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("1d lagrange: interpolation reproduces degree-k polynomials") {
  const auto mesh = std::make_shared<IntervalMesh>(
      build_interval_mesh(0.0, 2.0, 5, nullptr));
  for (int k = 1; k <= 4; ++k) {
    LagrangeSpace1d sp(mesh, k, false);
    CHECK(sp.dim() == 6 + 5 * (k - 1));
    auto f = [k](double x) { return std::pow(x - 0.7, k) + 2.0; };
    auto df = [k](double x) { return k * std::pow(x - 0.7, k - 1); };
    const Eigen::VectorXd u = sp.interpolate(f);
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> pick(0.0, 2.0);
    for (int i = 0; i < 25; ++i) {
      const double x = pick(rng);
      CHECK(sp.eval(u, x) == doctest::Approx(f(x)).epsilon(1e-12));
      CHECK(sp.eval_deriv(u, x) ==
            doctest::Approx(df(x)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("1d lagrange: dirichlet elimination drops exactly the end vertices") {
  const auto mesh = std::make_shared<IntervalMesh>(build_interval_mesh(
      -3 * M_PI / 2, 3 * M_PI / 2, 192, [](double x) { return x < 0 ? 0 : 1; }));
  LagrangeSpace1d u(mesh, 1, true);
  LagrangeSpace1d v(mesh, 1, false);
  CHECK(u.dim() == 191);
  CHECK(v.dim() == 193);
  CHECK(u.local_to_global(0, 0) == -1);
  CHECK(u.local_to_global(191, 1) == -1);
  CHECK(u.local_to_global(0, 1) == 0);
  // A Dirichlet interpolant vanishes at the ends by construction.
  const Eigen::VectorXd c = u.interpolate([](double) { return 1.0; });
  CHECK(u.eval(c, -3 * M_PI / 2 + 1e-9) == doctest::Approx(0.0).scale(1.0));
  CHECK(u.eval(c, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("1d coupling: matches independent quadrature and is skew-composable") {
  const auto mesh = unit_interval(3);
  LagrangeSpace1d u(mesh, 2, true);
  LagrangeSpace1d v(mesh, 2, false);
  const SpMat c = assemble_deriv_1d(u, v);
  CHECK(c.rows() == u.dim());
  CHECK(c.cols() == v.dim());

  // Independent check of x^T C y = integral of (v_h)' u_h via dense Gauss
  // quadrature on each cell with both functions evaluated pointwise.
  std::mt19937 rng(5);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd cu(u.dim()), cv(v.dim());
  for (auto& z : cu) z = gauss(rng);
  for (auto& z : cv) z = gauss(rng);
  const auto rule = gauss_legendre(8);
  double exact = 0.0;
  for (int e = 0; e < mesh->n_cells(); ++e) {
    const double h = mesh->cell_size(e);
    for (std::size_t p = 0; p < rule->nodes.size(); ++p) {
      const double x = mesh->cell_left(e) + h * rule->nodes[p];
      exact += h * rule->weights[p] * u.eval(cu, x) * v.eval_deriv(cv, x);
    }
  }
  CHECK(cu.dot(c * cv) == doctest::Approx(exact).epsilon(1e-12));

  // Constants in the differentiated slot are annihilated.
  CHECK((c * Eigen::VectorXd::Ones(v.dim())).norm() ==
        doctest::Approx(0.0).scale(1.0));

  // The composite first-order block is exactly skew by construction.
  std::vector<Eigen::Triplet<double>> trips;
  add_block(trips, c, 0, u.dim(), 1.0);
  add_block(trips, SpMat(c.transpose()), u.dim(), 0, -1.0);
  const SpMat a = compose(u.dim() + v.dim(), trips);
  CHECK((Eigen::MatrixXd(a) + Eigen::MatrixXd(a).transpose()).norm() == 0.0);
}

TEST_CASE("triangle mesh: counts, boundary flags, and point location") {
  const auto mesh = unit_square_mesh(2);
  CHECK(mesh->n_vertices() == 9);
  CHECK(mesh->n_tris() == 8);
  CHECK(mesh->n_edges() == 16);
  int nb = 0;
  for (const auto& e : mesh->edges) nb += e.on_boundary ? 1 : 0;
  CHECK(nb == 8);
  int vb = 0;
  for (bool b : mesh->vertex_on_boundary) vb += b ? 1 : 0;
  CHECK(vb == 8);
  double total = 0.0;
  for (int t = 0; t < mesh->n_tris(); ++t) total += mesh->area(t);
  CHECK(total == doctest::Approx(4.0).epsilon(1e-14));

  // Ascending vertex ids within each triangle (the orientation contract).
  for (const auto& tr : mesh->tris) {
    CHECK(tr.v[0] < tr.v[1]);
    CHECK(tr.v[1] < tr.v[2]);
  }

  const int t = mesh->locate({0.5, -0.9});
  const auto& tr = mesh->tris[t];
  const Eigen::Vector2d p(0.5, -0.9);
  // Barycentric coordinates of p must be nonnegative in the located tri.
  Eigen::Matrix2d b;
  b.col(0) = mesh->vertices[tr.v[1]] - mesh->vertices[tr.v[0]];
  b.col(1) = mesh->vertices[tr.v[2]] - mesh->vertices[tr.v[0]];
  const Eigen::Vector2d lam = b.inverse() * (p - mesh->vertices[tr.v[0]]);
  CHECK(lam.x() >= -1e-12);
  CHECK(lam.y() >= -1e-12);
  CHECK(lam.x() + lam.y() <= 1.0 + 1e-12);
  CHECK_THROWS_AS(mesh->locate({3.0, 0.0}), std::invalid_argument);

  // Subdomain tagging by centroid.
  const auto tagged = build_rect_trimesh(
      -1, 1, -1, 1, 2, 2,
      [](const Eigen::Vector2d& c) { return c.x() < 0 ? 0 : 1; });
  int left = 0;
  for (const auto& t2 : tagged.tris) left += t2.tag == 0 ? 1 : 0;
  CHECK(left == 4);
}

TEST_CASE("2d lagrange: dof counts and polynomial reproduction") {
  const auto mesh = unit_square_mesh(2);
  LagrangeSpace2d p1(mesh, 1, true);
  CHECK(p1.dim() == 1);  // single interior vertex
  LagrangeSpace2d p2(mesh, 2, true);
  CHECK(p2.dim() == 9);  // 1 vertex + 8 interior edges
  LagrangeSpace2d p1f(mesh, 1, false);
  CHECK(p1f.dim() == 9);

  const auto mesh3 = unit_square_mesh(3);
  for (int k = 1; k <= 4; ++k) {
    LagrangeSpace2d sp(mesh3, k, false);
    auto f = [k](const Eigen::Vector2d& p) {
      double s = 1.0;
      for (int d = 1; d <= k; ++d) s += std::pow(0.6 * p.x() - 0.3 * p.y(), d);
      return s;
    };
    const Eigen::VectorXd c = sp.interpolate(f);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> pick(-0.999, 0.999);
    for (int i = 0; i < 20; ++i) {
      const Eigen::Vector2d p(pick(rng), pick(rng));
      CHECK(sp.eval(c, p) == doctest::Approx(f(p)).epsilon(1e-11));
    }
    // Gradient check against the analytic derivative of the same f.
    auto gf = [k](const Eigen::Vector2d& p) {
      Eigen::Vector2d g(0, 0);
      for (int d = 1; d <= k; ++d) {
        const double base = d * std::pow(0.6 * p.x() - 0.3 * p.y(), d - 1);
        g += base * Eigen::Vector2d(0.6, -0.3);
      }
      return g;
    };
    const Eigen::Vector2d p(0.37, -0.41);
    CHECK((sp.eval_grad(c, p) - gf(p)).norm() <= 1e-10);
  }
}

TEST_CASE("2d lagrange: continuity across interior edges") {
  const auto mesh = unit_square_mesh(3);
  for (int k = 1; k <= 4; ++k) {
    LagrangeSpace2d sp(mesh, k, false);
    std::mt19937 rng(23 + k);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd c(sp.dim());
    for (auto& z : c) z = gauss(rng);

    for (int e = 0; e < mesh->n_edges(); ++e) {
      if (mesh->edges[e].on_boundary) continue;
      int ta = -1, tb = -1;
      for (int t = 0; t < mesh->n_tris(); ++t)
        for (int le = 0; le < 3; ++le)
          if (mesh->tris[t].edge[le] == e) (ta < 0 ? ta : tb) = t;
      REQUIRE(tb >= 0);
      const Eigen::Vector2d a = mesh->vertices[mesh->edges[e].v[0]];
      const Eigen::Vector2d b = mesh->vertices[mesh->edges[e].v[1]];
      for (double s : {0.21, 0.5, 0.87}) {
        const Eigen::Vector2d p = a + s * (b - a);
        CHECK(eval_on_tri(sp, c, ta, p) ==
              doctest::Approx(eval_on_tri(sp, c, tb, p)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("2d lagrange: mass partition of unity") {
  const auto mesh = unit_square_mesh(3);
  for (int k : {1, 2, 3}) {
    LagrangeSpace2d sp(mesh, k, false);
    const SpMat m = assemble_mass_p2d(sp);
    CHECK(Eigen::MatrixXd(m).sum() == doctest::Approx(4.0).epsilon(1e-13));
    // Indicator version: left half of the square.
    const auto tagged = std::make_shared<TriMesh>(build_rect_trimesh(
        -1, 1, -1, 1, 4, 4,
        [](const Eigen::Vector2d& c) { return c.x() < 0 ? 5 : 6; }));
    LagrangeSpace2d tsp(tagged, k, false);
    CHECK(Eigen::MatrixXd(assemble_mass_p2d(tsp, 5)).sum() ==
          doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("raviart-thomas: dof counts and field reproduction") {
  const auto mesh = unit_square_mesh(2);
  RtSpace2d rt0(mesh, 0);
  CHECK(rt0.dim() == 16);
  RtSpace2d rt1(mesh, 1);
  CHECK(rt1.dim() == 48);

  const auto mesh3 = unit_square_mesh(3);
  for (int j = 0; j <= 3; ++j) {
    RtSpace2d sp(mesh3, j);
    // A genuine member of the space: full vector polynomials of degree j
    // plus the position-times-homogeneous tail.
    auto f = [j](const Eigen::Vector2d& p) {
      const double m = std::pow(0.4 * p.x() + 0.7 * p.y() + 0.2, j);
      Eigen::Vector2d v(1.0 - 0.5 * std::pow(p.y(), j),
                        2.0 + std::pow(0.5 * p.x(), j));
      return Eigen::Vector2d(v + p * m);
    };
    const Eigen::VectorXd c = sp.interpolate(f);
    std::mt19937 rng(31 + j);
    std::uniform_real_distribution<double> pick(-0.999, 0.999);
    for (int i = 0; i < 15; ++i) {
      const Eigen::Vector2d p(pick(rng), pick(rng));
      CHECK((sp.eval(c, p) - f(p)).norm() <= 1e-10);
    }
  }
}

TEST_CASE("raviart-thomas: normal trace is single-valued across edges") {
  const auto mesh = unit_square_mesh(3);
  for (int j = 0; j <= 2; ++j) {
    RtSpace2d sp(mesh, j);
    std::mt19937 rng(41 + j);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd c(sp.dim());
    for (auto& z : c) z = gauss(rng);

    for (int e = 0; e < mesh->n_edges(); ++e) {
      if (mesh->edges[e].on_boundary) continue;
      int ta = -1, tb = -1;
      for (int t = 0; t < mesh->n_tris(); ++t)
        for (int le = 0; le < 3; ++le)
          if (mesh->tris[t].edge[le] == e) (ta < 0 ? ta : tb) = t;
      const Eigen::Vector2d a = mesh->vertices[mesh->edges[e].v[0]];
      const Eigen::Vector2d b = mesh->vertices[mesh->edges[e].v[1]];
      const Eigen::Vector2d t = (b - a).normalized();
      const Eigen::Vector2d n(t.y(), -t.x());
      for (double s : {0.13, 0.55, 0.92}) {
        const Eigen::Vector2d p = a + s * (b - a);
        const double qa = rt_eval_on_tri(sp, c, ta, p).dot(n);
        const double qb = rt_eval_on_tri(sp, c, tb, p).dot(n);
        CHECK(qa == doctest::Approx(qb).epsilon(1e-10).scale(1.0));
      }
    }
  }
}

TEST_CASE("raviart-thomas: divergence theorem ties coupling to the boundary") {
  const auto mesh = unit_square_mesh(3);
  LagrangeSpace2d ones_space(mesh, 1, false);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ones_space.dim());
  for (int j = 0; j <= 2; ++j) {
    RtSpace2d sp(mesh, j);
    std::mt19937 rng(53 + j);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd c(sp.dim());
    for (auto& z : c) z = gauss(rng);

    const SpMat cpl = assemble_div_coupling_2d(ones_space, sp);
    const double vol_integral = ones.dot(cpl * c);

    // Boundary integral of v.n with outward normals, via Gauss points.
    const auto rule = gauss_legendre(j + 3);
    double bnd = 0.0;
    for (int e = 0; e < mesh->n_edges(); ++e) {
      if (!mesh->edges[e].on_boundary) continue;
      const Eigen::Vector2d a = mesh->vertices[mesh->edges[e].v[0]];
      const Eigen::Vector2d b = mesh->vertices[mesh->edges[e].v[1]];
      const Eigen::Vector2d mid = 0.5 * (a + b);
      const Eigen::Vector2d t = (b - a).normalized();
      Eigen::Vector2d n(t.y(), -t.x());
      if (n.dot(mid) < 0) n = -n;  // outward on the centered square
      for (std::size_t p = 0; p < rule->nodes.size(); ++p) {
        const Eigen::Vector2d x = a + rule->nodes[p] * (b - a);
        bnd += (b - a).norm() * rule->weights[p] * sp.eval(c, x).dot(n);
      }
    }
    CHECK(vol_integral == doctest::Approx(bnd).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("raviart-thomas: vector mass against a constant field") {
  const auto mesh = unit_square_mesh(4);
  RtSpace2d sp(mesh, 0);
  const Eigen::VectorXd c =
      sp.interpolate([](const Eigen::Vector2d&) {
        return Eigen::Vector2d(1.0, 2.0);
      });
  const SpMat m = assemble_mass_rt2d(sp);
  CHECK(c.dot(m * c) == doctest::Approx(20.0).epsilon(1e-13));
  // Symmetry and positivity on the full space.
  const Eigen::MatrixXd md = Eigen::MatrixXd(m);
  CHECK((md - md.transpose()).norm() <= 1e-14 * md.norm());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(md);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
}
