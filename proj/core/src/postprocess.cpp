// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace stdg {

Eigen::VectorXd PostprocessedSolution::eval(double t) const {
  // from_left = false maps interface times to the right slab, where the
  // correction is active; continuity makes the choice immaterial except
  // that s stays inside [0, 1] without clamping surprises.
  const int m = base->slab_of(t, false);
  const double s =
      std::clamp((t - base->tmesh.nodes[m]) / base->tmesh.tau(m), 0.0, 1.0);
  const auto ell = base->bases[m]->values(s);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(base->n_dofs());
  for (int i = 0; i <= base->q; ++i) out += ell[i] * base->coeff[m].col(i);
  out -= thetas[m].value(s) * jumps[m];
  return out;
}

Eigen::VectorXd PostprocessedSolution::node_value(int m, int i) const {
  return base->coeff[m].col(i);
}

Eigen::VectorXd PostprocessedSolution::node_derivative(int m, int i) const {
  const Eigen::MatrixXd& d = base->bases[m]->diff();  // d(i,j) = l_j'(s_i)
  Eigen::VectorXd out = base->coeff[m] * d.row(i).transpose();
  out -= thetas[m].derivative(base->rules[m]->nodes[i]) * jumps[m];
  return out / base->tmesh.tau(m);
}

PostprocessedSolution postprocess(
    std::shared_ptr<const DiscreteSolution> base) {
  if (!base) throw std::invalid_argument("postprocess: null trajectory");
  PostprocessedSolution pp;
  pp.base = base;
  pp.jumps.reserve(base->n_slabs());
  pp.thetas.reserve(base->n_slabs());
  for (int m = 0; m < base->n_slabs(); ++m) {
    pp.jumps.push_back(base->jump(m));
    pp.thetas.push_back(build_theta(*base->rules[m]));
  }
  return pp;
}

PostprocessedSolution postprocess_weighted(
    std::shared_ptr<const DiscreteSolution> base) {
  if (!base) throw std::invalid_argument("postprocess: null trajectory");
  if (base->variant != Variant::weighted)
    throw std::invalid_argument(
        "postprocess_weighted: base must come from the weighted scheme");
  return postprocess(std::move(base));
}

namespace {

// Shared walk over all collocation nodes of a transformed-variant base.
template <typename Visit>
void for_each_node(const PostprocessedSolution& pp,
                   const EvolutionaryProblem& prob, const char* who,
                   Visit&& visit) {
  const DiscreteSolution& sol = *pp.base;
  if (sol.variant != Variant::transformed)
    throw std::invalid_argument(std::string(who) +
                                ": needs a transformed-variant base");
  for (int m = 0; m < sol.n_slabs(); ++m) {
    const double t0 = sol.tmesh.nodes[m];
    const double tau = sol.tmesh.tau(m);
    for (int i = 0; i <= sol.q; ++i) {
      const double t = t0 + tau * sol.rules[m]->nodes[i];
      const double w = tau * sol.rules[m]->weights[i];
      Eigen::VectorXd f = prob.rhs(t) * std::exp(-sol.rho * t);
      visit(m, i, t, w, f);
    }
  }
}

}  // namespace

double collocation_residual(const PostprocessedSolution& pp,
                            const EvolutionaryProblem& prob) {
  const auto& ops = *prob.ops;
  const double rho = pp.base->rho;
  double worst = 0.0;
  double fscale = 0.0;
  for_each_node(pp, prob, "collocation_residual",
                [&](int m, int i, double, double, Eigen::VectorXd& f) {
                  const Eigen::VectorXd v = pp.node_value(m, i);
                  const Eigen::VectorXd vp = pp.node_derivative(m, i);
                  Eigen::VectorXd r = ops.m0 * (vp + rho * v);
                  r += ops.m1 * v;
                  r += ops.a * v;
                  r -= f;
                  worst = std::max(worst, r.norm());
                  fscale = std::max(fscale, f.norm());
                });
  return worst / std::max(fscale, 1e-300);
}

double ReconstructionBalance::scale() const {
  return std::max({std::abs(temporal), std::abs(dissipation),
                   std::abs(source), 1e-300});
}

ReconstructionBalance energy_balance(const PostprocessedSolution& pp,
                                     const EvolutionaryProblem& prob) {
  const auto& ops = *prob.ops;
  const SpMat diss = pp.base->rho * ops.m0 + ops.m1;
  ReconstructionBalance b;
  for_each_node(pp, prob, "energy_balance",
                [&](int m, int i, double, double w, Eigen::VectorXd& f) {
                  const Eigen::VectorXd v = pp.node_value(m, i);
                  const Eigen::VectorXd vp = pp.node_derivative(m, i);
                  b.temporal += 2.0 * w * vp.dot(ops.m0 * v);
                  b.dissipation += 2.0 * w * v.dot(diss * v);
                  b.source += 2.0 * w * f.dot(v);
                });
  return b;
}

TrajSpec spec_of(const PostprocessedSolution& pp) {
  TrajSpec s;
  s.tmesh = &pp.base->tmesh;
  s.at = [&pp](double t, bool) { return pp.eval(t); };
  s.lift_rho = 0.0;
  return s;
}

}  // namespace stdg
