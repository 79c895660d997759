// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_QUADRATURE_HPP
#define STDG_QUADRATURE_HPP

#include <Eigen/Dense>

#include <memory>
#include <vector>

namespace stdg {

// Moments mu_k = int_0^1 s^k exp(-2 sigma s) ds for k = 0..kmax.
//
// The moments satisfy the exact recurrence
//   mu_0 = (1 - e^{-2 sigma}) / (2 sigma),
//   mu_k = (k mu_{k-1} - e^{-2 sigma}) / (2 sigma)   (sigma > 0),
// and mu_k = 1/(k+1) for sigma = 0.  The forward recurrence amplifies
// roundoff by k/(2 sigma) per step, so it is only used while k <= 2 sigma;
// the remaining moments are obtained from a positive-term series seed at
// k = kmax and the contractive backward recurrence
//   mu_{k-1} = (2 sigma mu_k + e^{-2 sigma}) / k.
std::vector<double> exp_moments(double sigma, int kmax);

// A (q+1)-point quadrature rule on the reference slab [0,1] with the right
// endpoint fixed at s = 1, exact for polynomials of degree <= 2q against the
// weight exp(-2 sigma s):
//
//   sum_i w_i p(s_i) = int_0^1 p(s) exp(-2 sigma s) ds,   deg p <= 2q.
//
// sigma = 0 reproduces the classical right-sided Gauss-Radau rule.
struct WeightedRadauRule {
  int q = 0;                    // temporal polynomial degree, q+1 nodes
  double sigma = 0.0;           // weight exponent on the reference slab
  std::vector<double> nodes;    // ascending, in (0,1], nodes[q] == 1
  std::vector<double> weights;  // positive, sum = mu_0(sigma)
};

// Builds (or fetches from a process-wide cache) the weighted Radau rule.
// The cache is keyed by (q, sigma rounded to 1e-14) and is safe for
// concurrent lookup.  Supported range: 0 <= q <= 10, 0 <= sigma <= 10;
// outside this range construction throws instead of degrading silently.
//
// Construction: Stieltjes orthogonalization of the monic polynomials of the
// weight on a fixed Gauss-Legendre discretization of [0,1], Gauss-Radau
// endpoint modification pinning s = 1, then a symmetric-tridiagonal
// eigensolve (Golub-Welsch) for nodes and weights.
std::shared_ptr<const WeightedRadauRule> build_weighted_radau(int q, double sigma);

// A reference rule mapped to a concrete slab (t_left, t_left + tau].  The
// absorbed weights W_i = tau * w_i satisfy
//   sum_i W_i v(t_i) = int v(t) exp(-2 rho (t - t_left)) dt,  deg v <= 2q,
// provided the reference rule was built with sigma = rho * tau.
struct SlabRule {
  std::shared_ptr<const WeightedRadauRule> ref;
  double t_left = 0.0;
  double tau = 1.0;
  double rho = 0.0;             // weight rate; 0 for unweighted slabs
  std::vector<double> nodes;    // t_left + tau * s_i, last == t_left + tau
  std::vector<double> weights;  // absorbed weights W_i = tau * w_i

  int q() const { return ref->q; }
  int n_nodes() const { return static_cast<int>(nodes.size()); }

  // Quadrature sum of sampled values.
  double sum(const std::vector<double>& values) const;
};

// Throws if |rule->sigma - rho * tau| > 1e-12 * max(1, sigma): the reference
// rule must match the slab it is mapped onto.
SlabRule map_to_slab(std::shared_ptr<const WeightedRadauRule> rule,
                     double t_left, double tau, double rho);

// Nodal Lagrange basis {l_i} on the reference nodes of a Radau rule,
// evaluated via barycentric formulas.  This is the temporal basis of a slab:
// collocation values at the rule nodes diagonalize the in-slab products,
// Q{l_i l_j} = w_i delta_ij.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(std::shared_ptr<const WeightedRadauRule> rule);

  int q() const { return rule_->q; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const WeightedRadauRule& rule() const { return *rule_; }

  // l_i(s) for all i; exact Kronecker delta when s coincides with a node.
  void values(double s, double* out) const;
  std::vector<double> values(double s) const;

  // l_i(0): left-endpoint values entering the jump terms.
  const std::vector<double>& left_values() const { return left_values_; }

  // Differentiation matrix D(i,j) = l_j'(s_i).
  const Eigen::MatrixXd& diff() const { return diff_; }

  // Interpolant of nodal samples, evaluated at reference coordinate s.
  double interpolate(const std::vector<double>& samples, double s) const;

 private:
  std::shared_ptr<const WeightedRadauRule> rule_;
  std::vector<double> nodes_;
  std::vector<double> bary_;         // barycentric weights
  std::vector<double> left_values_;  // l_i(0)
  Eigen::MatrixXd diff_;
};

// The post-processing bubble: the unique theta in P_{q+1} with
// theta(s_i) = 0 at all rule nodes and theta(0) = 1,
//   theta(s) = prod_i (s - s_i) / prod_i (0 - s_i).
// Its leading coefficient 1 / prod_i(-s_i) never vanishes, so subtracting
// jump * theta raises the slab degree to exactly q+1 whenever the jump is
// nonzero, removes the left-end discontinuity, and leaves all nodal values
// untouched.
struct ThetaPoly {
  int q = 0;
  std::vector<double> nodes;  // the rule nodes
  double denom = 1.0;         // prod_i (0 - s_i)

  double value(double s) const;
  double derivative(double s) const;
  // Monomial coefficients c_0..c_{q+1} (ascending powers).
  std::vector<double> coefficients() const;
};

ThetaPoly build_theta(const WeightedRadauRule& rule);

// Plain Gauss rules on [0,1], used for slab-interior error integration and
// as building blocks of the simplex rules.  Cached, thread-safe.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule on [0,1]; exact for degree <= 2n-1.
std::shared_ptr<const GaussRule> gauss_legendre(int n);

// n-point Gauss-Jacobi rule for the weight (1-s) on [0,1]; exact for
// degree <= 2n-1 against that weight.
std::shared_ptr<const GaussRule> gauss_jacobi10(int n);

// Conical-product rule on the reference triangle (0,0)-(1,0)-(0,1), exact
// for total degree <= degree.  Weights sum to 1/2.  Cached, thread-safe.
struct TriRule {
  std::vector<double> x, y, w;
  int n() const { return static_cast<int>(w.size()); }
};

std::shared_ptr<const TriRule> tri_quadrature(int degree);

}  // namespace stdg

#endif  // STDG_QUADRATURE_HPP
