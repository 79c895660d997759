// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_PROBLEMS_HPP
#define STDG_PROBLEMS_HPP

#include <memory>
#include <string>

#include "stdg/analysis.hpp"
#include "stdg/evolution.hpp"

namespace stdg {

// A benchmark problem discretized in space: composite finite element
// operators, a time-separable right-hand side, the canonical initial state,
// and quadrature machinery measuring distances to the known exact solution.
//
// Both built-in examples couple a time-derivative region (where M0 acts)
// with a stationary region (where M1 acts) through a skew first-order block:
//
//   example 1: interval (-3pi/2, 3pi/2), components (u, v) in Lagrange
//              spaces, coupling d/dx, M0 = diag(1, 1_{x<0}),
//              M1 = diag(0, 1_{x>0});
//   example 2: square (-1,1)^2, u in Lagrange, v in Raviart-Thomas,
//              coupling div/grad, M0 = 1_{x<0} I, M1 = 1_{x>0} I.
class DiscreteProblem {
 public:
  struct Impl;
  explicit DiscreteProblem(std::shared_ptr<const Impl> impl);

  const std::string& name() const;
  int dim() const;      // spatial dimension
  int degree() const;   // spatial polynomial degree k
  int n_cells() const;  // mesh refinement parameter N
  double t_end() const;
  int n_components() const;  // scalar solution components at a point

  const EvolutionaryProblem& evo() const;
  const SpMat& gram() const;  // composite (unrestricted) L2 mass
  const SpMat& m0() const;

  // Squared L2 distance between the coefficient state c and scale times the
  // exact solution at time t; restricted = true limits the integral to the
  // support of M0.
  double exact_err2(double t, const Eigen::VectorXd& c, bool restricted,
                    double scale = 1.0) const;

  // Norm-layer adapter.  rho_scale = 0 compares against the exact solution
  // itself; rho_scale > 0 compares against exp(-rho_scale t) times it (the
  // exponentially transformed unknown).
  SpatialSqError error_sq(double rho_scale = 0.0) const;

  // Canonical interpolant of the exact solution at time t (nodal values for
  // Lagrange components, edge/interior moments for Raviart-Thomas).
  Eigen::VectorXd interpolate_exact(double t) const;

  // Largest relative pointwise residual of the exact solution under the PDE
  // operator at n_samples random points inside smooth pieces, with finite
  // difference derivatives.  Guards the hand-derived right-hand sides.
  double fd_residual(int n_samples, unsigned seed) const;

  // Largest entry of (M1 + A) x0 - F(0) over rows whose basis functions are
  // supported away from the support of M0, relative to the load size.  There
  // the initial state must already balance the stationary part.
  double compatibility_residual() const;

  // Pointwise exact and discrete values (components stacked): (u, v) in one
  // dimension, (u, v_x, v_y) in two.
  Eigen::VectorXd exact_at(double t, const Eigen::VectorXd& x) const;
  Eigen::VectorXd fe_at(const Eigen::VectorXd& c,
                        const Eigen::VectorXd& x) const;

 private:
  std::shared_ptr<const Impl> impl_;
};

// N must be divisible by 6 so the solution-piece interfaces 0, pi/2, pi lie
// on mesh vertices.
DiscreteProblem example1(int n_cells, int k);

// N must be even so the interface x = 0 and the solution crease y = 0 lie on
// mesh lines.
DiscreteProblem example2(int n_cells, int k);

// Dispatch by example id (1 or 2).
DiscreteProblem make_example(int id, int n_cells, int k);

}  // namespace stdg

#endif  // STDG_PROBLEMS_HPP
