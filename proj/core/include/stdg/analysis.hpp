// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_ANALYSIS_HPP
#define STDG_ANALYSIS_HPP

#include <functional>
#include <vector>

#include "stdg/evolution.hpp"

namespace stdg {

// A trajectory prepared for norm evaluation: coefficient vectors over the
// time mesh plus an optional exponential lift applied to the coefficients.
struct TrajSpec {
  const TimeMesh* tmesh = nullptr;
  std::function<Eigen::VectorXd(double t, bool from_left)> at;
  double lift_rho = 0.0;
};

TrajSpec spec_of(const DiscreteSolution& sol);
TrajSpec spec_of(const LiftedSolution& sol);

// Squared spatial measurement ||exact(t) - U_c||^2 supplied by the problem
// layer; restricted = true measures only the components carried by M0.
// Purely discrete comparisons use gram_sq, which ignores t and the flag.
using SpatialSqError =
    std::function<double(double t, const Eigen::VectorXd& c, bool restricted)>;

SpatialSqError gram_sq(const SpMat& gram);

// sqrt( sum_m sum_g tau_m w_g e^{-2 rho t_g} sq(t_g, c(t_g)) ) with
// pts Gauss points per slab; rho = 0 gives the unweighted L2 norm.
double weighted_l2_error(const TrajSpec& traj, const SpatialSqError& sq,
                         double rho, int pts_per_slab);

// Discrete Q-norm at the trajectory's own quadrature nodes, slab-scaled by
// e^{-2 rho t_{m-1}}.
double q_norm_error(const DiscreteSolution& sol, const SpatialSqError& sq,
                    double rho);

// sup over sampled times (plus one-sided interface limits and t = 0) of
// sqrt(sq(t, c(t), restricted=true)).
double sup_m0_error(const TrajSpec& traj, const SpatialSqError& sq,
                    int samples_per_slab = 10);

// sum_m e^{-2 rho t_{m-1}} <M0 jump_m, jump_m> (the squared sum itself).
double jump_sum(const DiscreteSolution& sol, const SpMat& m0, double rho);

// log2(e_i / e_{i+1}); non-finite where undefined.
std::vector<double> eoc(const std::vector<double>& errors);

// Both sides of the discrete energy identity accumulated over the first
// `up_to_slabs` slabs (all slabs when negative).  For the weighted variant
// each slab contribution carries e^{-2 rho t_{m-1}} and the final energy
// carries e^{-2 rho t_i}; the transformed variant is unweighted.
struct EnergyAudit {
  double initial = 0.0;      // ||M0^(1/2) x0||^2
  double final_energy = 0.0; // weighted ||M0^(1/2) U(t_i^-)||^2
  double dissipation = 0.0;  // 2 sum Q_m <(rho M0 + M1) U, U>
  double jumps = 0.0;        // sum ||M0^(1/2) [U]||^2, slab-weighted
  double source = 0.0;       // 2 sum Q_m <F, U>

  double lhs() const { return final_energy + dissipation + jumps; }
  double rhs() const { return initial + source; }
  double gap() const { return lhs() - rhs(); }
  double scale() const;
};

EnergyAudit energy_audit(const DiscreteSolution& sol,
                         const EvolutionaryProblem& prob,
                         int up_to_slabs = -1);

}  // namespace stdg

#endif  // STDG_ANALYSIS_HPP
