// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/fe_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stdg {

LagrangeSpace1d::LagrangeSpace1d(std::shared_ptr<const IntervalMesh> mesh,
                                 int degree, bool dirichlet)
    : mesh_(std::move(mesh)), k_(degree), bc_(dirichlet) {
  if (!mesh_) throw std::invalid_argument("lagrange1d: null mesh");
  if (k_ < 1 || k_ > 10) throw std::invalid_argument("lagrange1d: degree");
  const int n = mesh_->n_cells();
  dim_ = (bc_ ? n - 1 : n + 1) + n * (k_ - 1);

  // Reference basis on [0,1] with equispaced nodes: invert the Vandermonde
  // transpose so that row a holds the monomial coefficients of basis a.
  Eigen::MatrixXd v(k_ + 1, k_ + 1);
  for (int a = 0; a <= k_; ++a) {
    const double s = static_cast<double>(a) / k_;
    double p = 1.0;
    for (int j = 0; j <= k_; ++j, p *= s) v(a, j) = p;
  }
  coef_ = v.fullPivLu().inverse().transpose();
}

int LagrangeSpace1d::local_to_global(int e, int a) const {
  const int n = mesh_->n_cells();
  if (a == 0 || a == k_) {
    const int vtx = (a == 0) ? e : e + 1;
    if (!bc_) return vtx;
    return (vtx == 0 || vtx == n) ? -1 : vtx - 1;
  }
  const int offset = bc_ ? n - 1 : n + 1;
  return offset + e * (k_ - 1) + (a - 1);
}

void LagrangeSpace1d::tabulate(const std::vector<double>& s,
                               Eigen::MatrixXd& val,
                               Eigen::MatrixXd& der) const {
  const int np = static_cast<int>(s.size());
  val.resize(k_ + 1, np);
  der.resize(k_ + 1, np);
  const double inv_h = mesh_->n_cells() / (mesh_->b - mesh_->a);
  for (int p = 0; p < np; ++p) {
    for (int a = 0; a <= k_; ++a) {
      double v = coef_(a, k_), d = 0.0;
      for (int j = k_ - 1; j >= 0; --j) {
        d = d * s[p] + (j + 1) * coef_(a, j + 1);
        v = v * s[p] + coef_(a, j);
      }
      val(a, p) = v;
      der(a, p) = d * inv_h;
    }
  }
}

void LagrangeSpace1d::eval_local(double x, int& cell, double& s) const {
  const int n = mesh_->n_cells();
  const double h = (mesh_->b - mesh_->a) / n;
  cell = std::clamp(static_cast<int>(std::floor((x - mesh_->a) / h)), 0,
                    n - 1);
  s = (x - mesh_->vertices[cell]) / h;
}

double LagrangeSpace1d::eval(const Eigen::VectorXd& coeff, double x) const {
  int e;
  double s;
  eval_local(x, e, s);
  double out = 0.0;
  for (int a = 0; a <= k_; ++a) {
    const int g = local_to_global(e, a);
    if (g < 0) continue;
    double v = coef_(a, k_);
    for (int j = k_ - 1; j >= 0; --j) v = v * s + coef_(a, j);
    out += coeff[g] * v;
  }
  return out;
}

double LagrangeSpace1d::eval_deriv(const Eigen::VectorXd& coeff,
                                   double x) const {
  int e;
  double s;
  eval_local(x, e, s);
  const double inv_h = mesh_->n_cells() / (mesh_->b - mesh_->a);
  double out = 0.0;
  for (int a = 0; a <= k_; ++a) {
    const int g = local_to_global(e, a);
    if (g < 0) continue;
    double d = 0.0;
    for (int j = k_ - 1; j >= 0; --j) d = d * s + (j + 1) * coef_(a, j + 1);
    out += coeff[g] * d * inv_h;
  }
  return out;
}

Eigen::VectorXd LagrangeSpace1d::interpolate(
    const std::function<double(double)>& f) const {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim_);
  const int n = mesh_->n_cells();
  const double h = (mesh_->b - mesh_->a) / n;
  for (int e = 0; e < n; ++e) {
    for (int a = 0; a <= k_; ++a) {
      const int g = local_to_global(e, a);
      if (g < 0) continue;
      u[g] = f(mesh_->vertices[e] + h * a / k_);
    }
  }
  return u;
}

}  // namespace stdg
