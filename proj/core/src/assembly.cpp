// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/assembly.hpp"

#include <cstdio>
#include <ostream>

#include "stdg/quadrature.hpp"

namespace stdg {

namespace {

std::vector<Eigen::Vector2d> tri_points(const TriRule& rule) {
  std::vector<Eigen::Vector2d> pts(rule.n());
  for (int i = 0; i < rule.n(); ++i) pts[i] = {rule.x[i], rule.y[i]};
  return pts;
}

// Scatter one element matrix, skipping eliminated dofs.
template <typename RowMap, typename ColMap>
void scatter(std::vector<Eigen::Triplet<double>>& out,
             const Eigen::MatrixXd& local, const RowMap& row_of,
             const ColMap& col_of) {
  for (Eigen::Index a = 0; a < local.rows(); ++a) {
    const int r = row_of(static_cast<int>(a));
    if (r < 0) continue;
    for (Eigen::Index b = 0; b < local.cols(); ++b) {
      const int c = col_of(static_cast<int>(b));
      if (c < 0) continue;
      out.emplace_back(r, c, local(a, b));
    }
  }
}

}  // namespace

SpMat assemble_mass_1d(const LagrangeSpace1d& sp, int tag) {
  const auto& mesh = sp.mesh();
  const auto rule = gauss_legendre(sp.degree() + 1);
  Eigen::MatrixXd val, der;
  sp.tabulate(rule->nodes, val, der);
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(sp.n_local(), sp.n_local());
  for (std::size_t p = 0; p < rule->nodes.size(); ++p)
    ref += rule->weights[p] * val.col(p) * val.col(p).transpose();

  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < mesh.n_cells(); ++e) {
    if (tag >= 0 && mesh.tags[e] != tag) continue;
    const Eigen::MatrixXd local = mesh.cell_size(e) * ref;
    scatter(trips, local, [&](int a) { return sp.local_to_global(e, a); },
            [&](int a) { return sp.local_to_global(e, a); });
  }
  return compose(sp.dim(), trips);
}

SpMat assemble_deriv_1d(const LagrangeSpace1d& rows,
                        const LagrangeSpace1d& cols) {
  const auto& mesh = rows.mesh();
  if (&mesh != &cols.mesh())
    throw std::invalid_argument("deriv coupling: spaces on different meshes");
  const auto rule =
      gauss_legendre(std::max(rows.degree(), cols.degree()) + 1);
  Eigen::MatrixXd val_r, der_r, val_c, der_c;
  rows.tabulate(rule->nodes, val_r, der_r);
  cols.tabulate(rule->nodes, val_c, der_c);  // der_c is physical (d/dx)

  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(rows.n_local(), cols.n_local());
  for (std::size_t p = 0; p < rule->nodes.size(); ++p)
    ref += rule->weights[p] * val_r.col(p) * der_c.col(p).transpose();

  std::vector<Eigen::Triplet<double>> trips;
  for (int e = 0; e < mesh.n_cells(); ++e) {
    const Eigen::MatrixXd local = mesh.cell_size(e) * ref;
    scatter(trips, local, [&](int a) { return rows.local_to_global(e, a); },
            [&](int a) { return cols.local_to_global(e, a); });
  }
  SpMat c(rows.dim(), cols.dim());
  c.setFromTriplets(trips.begin(), trips.end());
  return c;
}

SpMat assemble_mass_p2d(const LagrangeSpace2d& sp, int tag) {
  const auto& mesh = sp.mesh();
  const auto rule = tri_quadrature(2 * sp.degree());
  const auto pts = tri_points(*rule);
  const double h2 = mesh.hx * mesh.hy;

  Eigen::MatrixXd ref[2];
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd val, gx, gy;
    sp.tabulate(cls, pts, val, gx, gy);
    ref[cls] = Eigen::MatrixXd::Zero(sp.n_local(), sp.n_local());
    for (int p = 0; p < rule->n(); ++p)
      ref[cls] += rule->w[p] * val.col(p) * val.col(p).transpose();
    ref[cls] *= h2;
  }

  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    if (tag >= 0 && mesh.tris[t].tag != tag) continue;
    scatter(trips, ref[mesh.tris[t].cls],
            [&](int a) { return sp.local_to_global(t, a); },
            [&](int a) { return sp.local_to_global(t, a); });
  }
  return compose(sp.dim(), trips);
}

SpMat assemble_mass_rt2d(const RtSpace2d& sp, int tag) {
  const auto& mesh = sp.mesh();
  const auto rule = tri_quadrature(2 * (sp.order() + 1));
  const auto pts = tri_points(*rule);
  const double h2 = mesh.hx * mesh.hy;

  Eigen::MatrixXd ref[2];
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd vx, vy, dv;
    sp.tabulate(cls, pts, vx, vy, dv);
    ref[cls] = Eigen::MatrixXd::Zero(sp.n_local(), sp.n_local());
    for (int p = 0; p < rule->n(); ++p)
      ref[cls] += rule->w[p] * (vx.col(p) * vx.col(p).transpose() +
                                vy.col(p) * vy.col(p).transpose());
    ref[cls] *= h2;
  }

  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    if (tag >= 0 && mesh.tris[t].tag != tag) continue;
    scatter(trips, ref[mesh.tris[t].cls],
            [&](int a) { return sp.local_to_global(t, a); },
            [&](int a) { return sp.local_to_global(t, a); });
  }
  return compose(sp.dim(), trips);
}

SpMat assemble_div_coupling_2d(const LagrangeSpace2d& rows,
                               const RtSpace2d& cols) {
  const auto& mesh = rows.mesh();
  if (&mesh != &cols.mesh())
    throw std::invalid_argument("div coupling: spaces on different meshes");
  const auto rule = tri_quadrature(rows.degree() + cols.order());
  const auto pts = tri_points(*rule);
  const double h2 = mesh.hx * mesh.hy;

  Eigen::MatrixXd ref[2];
  for (int cls = 0; cls < 2; ++cls) {
    Eigen::MatrixXd val, gx, gy, vx, vy, dv;
    rows.tabulate(cls, pts, val, gx, gy);
    cols.tabulate(cls, pts, vx, vy, dv);  // dv is physical divergence
    ref[cls] = Eigen::MatrixXd::Zero(rows.n_local(), cols.n_local());
    for (int p = 0; p < rule->n(); ++p)
      ref[cls] += rule->w[p] * val.col(p) * dv.col(p).transpose();
    ref[cls] *= h2;
  }

  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh.n_tris(); ++t) {
    scatter(trips, ref[mesh.tris[t].cls],
            [&](int a) { return rows.local_to_global(t, a); },
            [&](int a) { return cols.local_to_global(t, a); });
  }
  SpMat c(rows.dim(), cols.dim());
  c.setFromTriplets(trips.begin(), trips.end());
  return c;
}

void add_block(std::vector<Eigen::Triplet<double>>& out, const SpMat& block,
               Eigen::Index row0, Eigen::Index col0, double scale) {
  for (int k = 0; k < block.outerSize(); ++k) {
    for (SpMat::InnerIterator it(block, k); it; ++it) {
      out.emplace_back(static_cast<int>(row0 + it.row()),
                       static_cast<int>(col0 + it.col()),
                       scale * it.value());
    }
  }
}

SpMat compose(Eigen::Index n, const std::vector<Eigen::Triplet<double>>& t) {
  SpMat m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void write_triplets(std::ostream& os, const SpMat& m) {
  char buf[96];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      std::snprintf(buf, sizeof(buf), "%ld %ld %.17g\n",
                    static_cast<long>(it.row()), static_cast<long>(it.col()),
                    it.value());
      os << buf;
    }
  }
}

}  // namespace stdg
