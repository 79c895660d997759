// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_POSTPROCESS_HPP
#define STDG_POSTPROCESS_HPP

#include <memory>
#include <vector>

#include "stdg/analysis.hpp"
#include "stdg/evolution.hpp"
#include "stdg/quadrature.hpp"

namespace stdg {

// Continuous reconstruction of a marched trajectory.  On every slab the
// incoming jump is subtracted times a polynomial of degree q+1 that equals
// one at the slab's left endpoint and vanishes at all quadrature nodes, so
// the result is globally continuous, starts at x0, keeps every nodal value
// of the base solution, and raises the temporal degree by one.
struct PostprocessedSolution {
  std::shared_ptr<const DiscreteSolution> base;
  std::vector<Eigen::VectorXd> jumps;  // incoming jump of the base, per slab
  std::vector<ThetaPoly> thetas;       // correction polynomial, per slab

  int n_slabs() const { return base->n_slabs(); }
  const TimeMesh& tmesh() const { return base->tmesh; }

  // Continuous in t; interface times may be queried from either side.
  Eigen::VectorXd eval(double t) const;

  // Value and time derivative at quadrature node i of slab m.  The value is
  // the base coefficient column (the correction vanishes at nodes); the
  // derivative combines the nodal differentiation matrix with the
  // correction's slope and is what the collocation check consumes.
  Eigen::VectorXd node_value(int m, int i) const;
  Eigen::VectorXd node_derivative(int m, int i) const;
};

// Builds the reconstruction from any marched base.  The correction
// polynomial is formed on each slab's own quadrature nodes: for a
// transformed-variant base these are the unweighted Radau nodes, for a
// weighted base the rho-dependent ones.
PostprocessedSolution postprocess(std::shared_ptr<const DiscreteSolution> base);

// Same transformation, restricted to weighted-variant bases (throws
// otherwise).  Exists as a separate entry point because the weighted
// reconstruction is an experimental device: it improves observed orders but
// carries no collocation identity.
PostprocessedSolution postprocess_weighted(
    std::shared_ptr<const DiscreteSolution> base);

// Largest Euclidean residual of the collocated equations
//   M0 R'(t_i) + (rho M0 + M1 + A) R(t_i) = e^{-rho t_i} F(t_i)
// over all slabs and nodes, divided by the largest Euclidean norm of the
// right-hand side (zero sources give zero).  Only the transformed variant
// satisfies these equations; other bases are rejected.
double collocation_residual(const PostprocessedSolution& pp,
                            const EvolutionaryProblem& prob);

// Quadrature balance obtained by pairing the collocated equation with the
// reconstruction itself; the skew part drops out pointwise and no jump
// quantities appear because the reconstruction is continuous:
//   temporal + dissipation = source, with
//   temporal    = 2 sum_{m,i} W_i <M0 R'(t_i), R(t_i)>
//   dissipation = 2 sum_{m,i} W_i <(rho M0 + M1) R(t_i), R(t_i)>
//   source      = 2 sum_{m,i} W_i <e^{-rho t_i} F(t_i), R(t_i)>.
// Transformed-variant bases only.
struct ReconstructionBalance {
  double temporal = 0.0;
  double dissipation = 0.0;
  double source = 0.0;

  double gap() const { return temporal + dissipation - source; }
  double scale() const;
};

ReconstructionBalance energy_balance(const PostprocessedSolution& pp,
                                     const EvolutionaryProblem& prob);

// Norm-evaluation adapter; the caller keeps pp alive and may set lift_rho
// on the returned spec to compare against unweighted references.
TrajSpec spec_of(const PostprocessedSolution& pp);

}  // namespace stdg

#endif  // STDG_POSTPROCESS_HPP
