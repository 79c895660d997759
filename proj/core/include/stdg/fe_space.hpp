// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_FE_SPACE_HPP
#define STDG_FE_SPACE_HPP

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <vector>

#include "stdg/mesh.hpp"

namespace stdg {

// Continuous Lagrange elements of given degree on an interval mesh, with
// equispaced nodes per cell.  With homogeneous Dirichlet conditions the two
// boundary vertex dofs are eliminated from the global numbering.
//
// Tabulation works on reference coordinates s in [0,1]; reported derivatives
// are physical (d/dx).  All cells share one reference table because the mesh
// is equidistant.
class LagrangeSpace1d {
 public:
  LagrangeSpace1d(std::shared_ptr<const IntervalMesh> mesh, int degree,
                  bool dirichlet);

  int degree() const { return k_; }
  bool dirichlet() const { return bc_; }
  int dim() const { return dim_; }
  int n_local() const { return k_ + 1; }
  const IntervalMesh& mesh() const { return *mesh_; }

  // Global dof of local node a in cell e; -1 for an eliminated boundary dof.
  int local_to_global(int e, int a) const;

  void tabulate(const std::vector<double>& s, Eigen::MatrixXd& val,
                Eigen::MatrixXd& der) const;

  double eval(const Eigen::VectorXd& coeff, double x) const;
  double eval_deriv(const Eigen::VectorXd& coeff, double x) const;

  // Nodal interpolation; for a Dirichlet space the boundary values of f are
  // simply dropped.
  Eigen::VectorXd interpolate(const std::function<double(double)>& f) const;

 private:
  void eval_local(double x, int& cell, double& s) const;

  std::shared_ptr<const IntervalMesh> mesh_;
  int k_;
  bool bc_;
  int dim_;
  Eigen::MatrixXd coef_;  // coef_(a,j): s^j coefficient of reference basis a
};

// Continuous Lagrange elements on a structured triangle mesh (square cells,
// hx == hy).  Nodes sit on the degree-k barycentric lattice; edge dofs are
// ordered along the global (ascending-vertex) edge direction so neighboring
// elements agree on shared dofs.  Dirichlet elimination removes all dofs on
// the outer boundary.
class LagrangeSpace2d {
 public:
  LagrangeSpace2d(std::shared_ptr<const TriMesh> mesh, int degree,
                  bool dirichlet);

  int degree() const { return k_; }
  bool dirichlet() const { return bc_; }
  int dim() const { return dim_; }
  int n_local() const { return static_cast<int>(lattice_.size()); }
  const TriMesh& mesh() const { return *mesh_; }

  int local_to_global(int t, int a) const;

  // Tabulate basis values and physical gradients for one congruence class at
  // points of the reference triangle (0,0)-(1,0)-(0,1).
  void tabulate(int cls, const std::vector<Eigen::Vector2d>& ref_pts,
                Eigen::MatrixXd& val, Eigen::MatrixXd& gx,
                Eigen::MatrixXd& gy) const;

  double eval(const Eigen::VectorXd& coeff, const Eigen::Vector2d& p) const;
  Eigen::Vector2d eval_grad(const Eigen::VectorXd& coeff,
                            const Eigen::Vector2d& p) const;

  Eigen::VectorXd interpolate(
      const std::function<double(const Eigen::Vector2d&)>& f) const;

  // Scaled offset of a point inside triangle t relative to its first vertex,
  // in units of the grid spacing (the coordinates the basis is built in).
  Eigen::Vector2d local_coords(int t, const Eigen::Vector2d& p) const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  int k_;
  bool bc_;
  int dim_;
  double h_;
  std::vector<std::array<int, 3>> lattice_;  // multi-indices, |i| = k
  std::vector<int> vertex_dof_, edge_dof_;   // global ids (-1 eliminated)
  int interior_offset_ = 0, n_interior_ = 0;
  Eigen::MatrixXd coef_[2];  // per class: monomial coefficients of the basis
};

// Raviart-Thomas elements RT_j on the same structured triangle mesh,
// H(div)-conforming. Degrees of freedom are mean moments of the normal trace
// against shifted Legendre polynomials in the global edge parametrization,
// plus interior moments against vector monomials; both are single-valued
// across elements by construction, so no per-element sign flips occur.
class RtSpace2d {
 public:
  RtSpace2d(std::shared_ptr<const TriMesh> mesh, int order);

  int order() const { return j_; }
  int dim() const { return dim_; }
  int n_local() const { return (j_ + 1) * (j_ + 3); }
  const TriMesh& mesh() const { return *mesh_; }

  int local_to_global(int t, int a) const;

  // Physical field components and physical divergence at reference points.
  void tabulate(int cls, const std::vector<Eigen::Vector2d>& ref_pts,
                Eigen::MatrixXd& vx, Eigen::MatrixXd& vy,
                Eigen::MatrixXd& dv) const;

  Eigen::Vector2d eval(const Eigen::VectorXd& coeff,
                       const Eigen::Vector2d& p) const;
  double eval_div(const Eigen::VectorXd& coeff, const Eigen::Vector2d& p) const;

  // Canonical interpolation: evaluates the defining edge and interior moment
  // functionals on f.
  Eigen::VectorXd interpolate(
      const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f) const;

 private:
  Eigen::VectorXd dof_values(
      int t, const std::function<Eigen::Vector2d(const Eigen::Vector2d&)>& f)
      const;

  std::shared_ptr<const TriMesh> mesh_;
  int j_;
  int dim_;
  double h_;
  // Per class: coefficients of the dual basis in the spanning set, and the
  // spanning set's monomial data (built once in the constructor).
  Eigen::MatrixXd coef_[2];
};

}  // namespace stdg

#endif  // STDG_FE_SPACE_HPP
