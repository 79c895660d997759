// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_EVOLUTION_HPP
#define STDG_EVOLUTION_HPP

#include <functional>
#include <memory>
#include <vector>

#include "stdg/assembly.hpp"
#include "stdg/quadrature.hpp"

namespace stdg {

// Partition 0 = t_0 < t_1 < ... < t_M = T of the time interval.
struct TimeMesh {
  std::vector<double> nodes;

  static TimeMesh uniform(double t_end, int n_slabs);

  int n_slabs() const { return static_cast<int>(nodes.size()) - 1; }
  double t_end() const { return nodes.back(); }
  double tau(int m) const { return nodes[m + 1] - nodes[m]; }
};

// First-order evolutionary system
//   (d/dt M0 + M1 + A) U = F,  U(0) = x0,
// with M0, M1 symmetric positive semidefinite and A skew symmetric.  rho0 is
// the infimum of admissible weight rates: marching requires rho >= rho0 and
// additionally verifies that rho*M0 + M1 is positive definite.
struct EvolutionaryProblem {
  std::shared_ptr<const BlockOperator> ops;
  std::function<Eigen::VectorXd(double)> rhs;
  Eigen::VectorXd x0;
  double rho0 = 0.0;
};

// Which slab scheme produced a trajectory.
//
// weighted:    nodes and weights of each slab rule account for the weight
//              exp(-2 rho t); the trajectory approximates U itself.
// transformed: the substitution V = exp(-rho t) U is discretized with the
//              unweighted (sigma = 0) rule; the trajectory approximates V and
//              lift_exponential recovers an approximation of U.
enum class Variant { weighted, transformed };

// Piecewise-polynomial-in-time coefficient trajectory.  Slab m stores the
// nodal values at the rule nodes mapped into (t_m, t_{m+1}]; the rightmost
// node coincides with the slab end, so end_value(m) is column q.
class DiscreteSolution {
 public:
  Variant variant = Variant::weighted;
  double rho = 0.0;
  int q = 0;
  TimeMesh tmesh;
  Eigen::VectorXd x0;
  std::vector<std::shared_ptr<const WeightedRadauRule>> rules;
  std::vector<std::shared_ptr<const LagrangeBasis>> bases;
  std::vector<Eigen::MatrixXd> coeff;  // n x (q+1) per slab

  int n_slabs() const { return tmesh.n_slabs(); }
  Eigen::Index n_dofs() const { return x0.size(); }

  Eigen::VectorXd value(int m, int i) const { return coeff[m].col(i); }
  Eigen::VectorXd end_value(int m) const { return coeff[m].col(q); }
  // One-sided limit at the slab start t_m^+ (extrapolation to s = 0).
  Eigen::VectorXd start_value(int m) const;
  // start_value(m) minus the incoming value (x0 ahead of the first slab).
  Eigen::VectorXd jump(int m) const;

  // Value at time t; at slab interfaces from_left picks the limit.
  Eigen::VectorXd eval(double t, bool from_left = true) const;

  // Slab index whose closure contains t under the chosen limit convention.
  int slab_of(double t, bool from_left = true) const;
};

// Strategy for the per-slab linear systems.  coupled factors the full
// (q+1)n block system once per distinct slab geometry.  diagonalized
// eigendecomposes the (q+1)x(q+1) temporal matrix and factors one n x n
// system per eigenvalue (complex-conjugate pairs share a factor), which
// costs far less memory on large spatial meshes.  automatic picks
// diagonalized once the coupled system would exceed an internal size limit.
enum class SlabSolver { automatic, coupled, diagonalized };

DiscreteSolution march(const EvolutionaryProblem& prob, const TimeMesh& tmesh,
                       int q, double rho, Variant variant,
                       SlabSolver solver = SlabSolver::automatic);

// View of exp(rho t) * base(t); turns a transformed trajectory back into an
// approximation of the original unknown.
struct LiftedSolution {
  std::shared_ptr<const DiscreteSolution> base;
  double rho = 0.0;

  Eigen::VectorXd eval(double t, bool from_left = true) const;
};

LiftedSolution lift_exponential(std::shared_ptr<const DiscreteSolution> base);

}  // namespace stdg

#endif  // STDG_EVOLUTION_HPP
