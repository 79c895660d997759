// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stdg {

TrajSpec spec_of(const DiscreteSolution& sol) {
  TrajSpec s;
  s.tmesh = &sol.tmesh;
  s.at = [&sol](double t, bool from_left) { return sol.eval(t, from_left); };
  return s;
}

TrajSpec spec_of(const LiftedSolution& sol) {
  TrajSpec s;
  s.tmesh = &sol.base->tmesh;
  const DiscreteSolution* base = sol.base.get();
  s.at = [base](double t, bool from_left) { return base->eval(t, from_left); };
  s.lift_rho = sol.rho;
  return s;
}

SpatialSqError gram_sq(const SpMat& gram) {
  return [&gram](double, const Eigen::VectorXd& c, bool) {
    return c.dot(gram * c);
  };
}

double weighted_l2_error(const TrajSpec& traj, const SpatialSqError& sq,
                         double rho, int pts_per_slab) {
  if (!traj.tmesh || !traj.at)
    throw std::invalid_argument("l2 error: incomplete trajectory");
  const auto rule = gauss_legendre(pts_per_slab);
  double total = 0.0;
  for (int m = 0; m < traj.tmesh->n_slabs(); ++m) {
    const double t0 = traj.tmesh->nodes[m];
    const double tau = traj.tmesh->tau(m);
    for (std::size_t g = 0; g < rule->nodes.size(); ++g) {
      const double t = t0 + tau * rule->nodes[g];
      Eigen::VectorXd c = traj.at(t, false);
      if (traj.lift_rho != 0.0) c *= std::exp(traj.lift_rho * t);
      total += tau * rule->weights[g] * std::exp(-2.0 * rho * t) *
               sq(t, c, false);
    }
  }
  return std::sqrt(total);
}

double q_norm_error(const DiscreteSolution& sol, const SpatialSqError& sq,
                    double rho) {
  double total = 0.0;
  for (int m = 0; m < sol.n_slabs(); ++m) {
    const double t0 = sol.tmesh.nodes[m];
    const double tau = sol.tmesh.tau(m);
    const double pre = std::exp(-2.0 * rho * t0);
    for (int i = 0; i <= sol.q; ++i) {
      const double t = t0 + tau * sol.rules[m]->nodes[i];
      total += pre * tau * sol.rules[m]->weights[i] *
               sq(t, sol.coeff[m].col(i), false);
    }
  }
  return std::sqrt(total);
}

double sup_m0_error(const TrajSpec& traj, const SpatialSqError& sq,
                    int samples_per_slab) {
  if (samples_per_slab < 2)
    throw std::invalid_argument("sup error: need at least both endpoints");
  double worst = 0.0;
  {
    // The incoming state at t = 0.
    const double t = traj.tmesh->nodes.front();
    Eigen::VectorXd c = traj.at(t, true);
    if (traj.lift_rho != 0.0) c *= std::exp(traj.lift_rho * t);
    worst = sq(t, c, true);
  }
  for (int m = 0; m < traj.tmesh->n_slabs(); ++m) {
    const double t0 = traj.tmesh->nodes[m];
    const double tau = traj.tmesh->tau(m);
    for (int j = 0; j < samples_per_slab; ++j) {
      const double s = static_cast<double>(j) / (samples_per_slab - 1);
      const double t = t0 + tau * s;
      // j = 0 takes the right limit into the slab, the last sample the left
      // limit at the slab end; interior points are one-sided anyway.
      Eigen::VectorXd c = traj.at(t, j == samples_per_slab - 1);
      if (traj.lift_rho != 0.0) c *= std::exp(traj.lift_rho * t);
      worst = std::max(worst, sq(t, c, true));
    }
  }
  return std::sqrt(worst);
}

double jump_sum(const DiscreteSolution& sol, const SpMat& m0, double rho) {
  double total = 0.0;
  for (int m = 0; m < sol.n_slabs(); ++m) {
    const Eigen::VectorXd j = sol.jump(m);
    total += std::exp(-2.0 * rho * sol.tmesh.nodes[m]) * j.dot(m0 * j);
  }
  return total;
}

std::vector<double> eoc(const std::vector<double>& errors) {
  std::vector<double> rates;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] > 0.0 && errors[i + 1] > 0.0 && std::isfinite(errors[i]) &&
        std::isfinite(errors[i + 1]))
      rates.push_back(std::log2(errors[i] / errors[i + 1]));
    else
      rates.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  return rates;
}

double EnergyAudit::scale() const {
  return std::max({std::abs(initial), std::abs(final_energy),
                   std::abs(dissipation), std::abs(jumps), std::abs(source),
                   1e-300});
}

EnergyAudit energy_audit(const DiscreteSolution& sol,
                         const EvolutionaryProblem& prob, int up_to_slabs) {
  const auto& ops = *prob.ops;
  const int slabs =
      (up_to_slabs < 0) ? sol.n_slabs() : std::min(up_to_slabs, sol.n_slabs());
  const bool weighted = (sol.variant == Variant::weighted);
  const SpMat diss = sol.rho * ops.m0 + ops.m1;

  EnergyAudit a;
  a.initial = sol.x0.dot(ops.m0 * sol.x0);
  for (int m = 0; m < slabs; ++m) {
    const double t0 = sol.tmesh.nodes[m];
    const double tau = sol.tmesh.tau(m);
    const double pre = weighted ? std::exp(-2.0 * sol.rho * t0) : 1.0;
    const Eigen::VectorXd j = sol.jump(m);
    a.jumps += pre * j.dot(ops.m0 * j);
    for (int i = 0; i <= sol.q; ++i) {
      const double t = t0 + tau * sol.rules[m]->nodes[i];
      const double w = tau * sol.rules[m]->weights[i];
      const Eigen::VectorXd& c = sol.coeff[m].col(i);
      a.dissipation += pre * 2.0 * w * c.dot(diss * c);
      Eigen::VectorXd f = prob.rhs(t);
      if (sol.variant == Variant::transformed) f *= std::exp(-sol.rho * t);
      a.source += pre * 2.0 * w * f.dot(c);
    }
  }
  if (slabs > 0) {
    const double t_end = sol.tmesh.nodes[slabs];
    const double pre = weighted ? std::exp(-2.0 * sol.rho * t_end) : 1.0;
    const Eigen::VectorXd e = sol.coeff[slabs - 1].col(sol.q);
    a.final_energy = pre * e.dot(ops.m0 * e);
  } else {
    a.final_energy = a.initial;
  }
  return a;
}

}  // namespace stdg
