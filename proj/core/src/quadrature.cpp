// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace stdg {

namespace {

constexpr int kMaxDegree = 10;
constexpr double kMaxSigma = 10.0;

// Gauss rule from recurrence coefficients of the monic orthogonal
// polynomials: nodes are eigenvalues of the symmetric tridiagonal Jacobi
// matrix, weights beta_0 times the squared first eigenvector components.
GaussRule golub_welsch(const std::vector<double>& alpha,
                       const std::vector<double>& beta) {
  const int n = static_cast<int>(alpha.size());
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jac(i, i) = alpha[i];
    if (i > 0) {
      const double b = std::sqrt(beta[i]);
      jac(i, i - 1) = b;
      jac(i - 1, i) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("golub_welsch: tridiagonal eigensolve failed");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = beta[0] * v0 * v0;
  }
  return rule;
}

// Monic shifted-Legendre recurrence on [0,1]: alpha_k = 1/2,
// beta_0 = 1, beta_k = k^2 / (4 (4 k^2 - 1)).
GaussRule make_gauss_legendre(int n) {
  std::vector<double> alpha(n, 0.5), beta(n);
  beta[0] = 1.0;
  for (int k = 1; k < n; ++k) beta[k] = k * k / (4.0 * (4.0 * k * k - 1.0));
  return golub_welsch(alpha, beta);
}

// Stieltjes orthogonalization against a discrete inner product
// <f,g> = sum_l omega_l f(x_l) g(x_l).  Returns n_coeff pairs (alpha, beta)
// of the monic three-term recurrence pi_{k+1} = (x - alpha_k) pi_k -
// beta_k pi_{k-1}, with beta_0 = <1,1>.
void stieltjes(const std::vector<double>& x, const std::vector<double>& omega,
               int n_coeff, std::vector<double>& alpha,
               std::vector<double>& beta) {
  const int m = static_cast<int>(x.size());
  alpha.assign(n_coeff, 0.0);
  beta.assign(n_coeff, 0.0);
  std::vector<double> p_prev(m, 0.0), p(m, 1.0);
  double nrm_prev = 0.0;
  for (int k = 0; k < n_coeff; ++k) {
    double nrm = 0.0, xnrm = 0.0;
    for (int l = 0; l < m; ++l) {
      const double t = omega[l] * p[l] * p[l];
      nrm += t;
      xnrm += x[l] * t;
    }
    if (!(nrm > 0.0))
      throw std::runtime_error("stieltjes: inner product lost positivity");
    alpha[k] = xnrm / nrm;
    beta[k] = (k == 0) ? nrm : nrm / nrm_prev;
    if (k + 1 < n_coeff) {
      for (int l = 0; l < m; ++l) {
        const double next = (x[l] - alpha[k]) * p[l] - beta[k] * p_prev[l];
        p_prev[l] = p[l];
        p[l] = next;
      }
    }
    nrm_prev = nrm;
  }
}

std::shared_ptr<const WeightedRadauRule> make_weighted_radau(int q,
                                                             double sigma) {
  // Discretize the weight on a fixed Gauss-Legendre grid.  96 points
  // integrate poly * exp(-2 sigma s) far below 1e-16 relative error for
  // sigma <= 10, and exactly when sigma = 0.
  const auto gl = gauss_legendre(96);
  const int m = static_cast<int>(gl->nodes.size());
  std::vector<double> omega(m);
  for (int l = 0; l < m; ++l)
    omega[l] = gl->weights[l] * std::exp(-2.0 * sigma * gl->nodes[l]);

  // Recurrence coefficients alpha_0..alpha_{q+1}, beta_0..beta_{q+1}.
  std::vector<double> alpha, beta;
  stieltjes(gl->nodes, omega, q + 2, alpha, beta);

  // Gauss-Radau endpoint modification: replace alpha_q so that s = 1
  // becomes a node, alpha*_q = 1 - beta_q pi_{q-1}(1) / pi_q(1), with the
  // monic pi evaluated by the recurrence itself.
  double p_prev = 0.0, p_cur = 1.0;  // pi_{-1}(1), pi_0(1)
  for (int k = 0; k < q; ++k) {
    const double p_next = (1.0 - alpha[k]) * p_cur - beta[k] * p_prev;
    p_prev = p_cur;
    p_cur = p_next;
  }
  if (!(p_cur > 0.0))
    throw std::runtime_error(
        "weighted Radau rule: orthogonal polynomial vanished at s=1");
  std::vector<double> alpha_mod(alpha.begin(), alpha.begin() + q + 1);
  alpha_mod[q] = 1.0 - beta[q] * p_prev / p_cur;
  std::vector<double> beta_mod(beta.begin(), beta.begin() + q + 1);

  GaussRule gr = golub_welsch(alpha_mod, beta_mod);

  auto rule = std::make_shared<WeightedRadauRule>();
  rule->q = q;
  rule->sigma = sigma;
  rule->nodes = std::move(gr.nodes);
  rule->weights = std::move(gr.weights);

  // Validate and pin the endpoint node exactly.
  if (std::abs(rule->nodes[q] - 1.0) > 1e-9)
    throw std::runtime_error(
        "weighted Radau rule: endpoint node did not converge to 1");
  rule->nodes[q] = 1.0;
  if (!(rule->nodes[0] > 0.0))
    throw std::runtime_error("weighted Radau rule: node escaped (0,1]");
  for (int i = 0; i <= q; ++i) {
    if (!(rule->weights[i] > 0.0))
      throw std::runtime_error("weighted Radau rule: nonpositive weight");
    if (i > 0 && !(rule->nodes[i] > rule->nodes[i - 1]))
      throw std::runtime_error("weighted Radau rule: nodes not ascending");
  }

  // Self-check exactness against the independent moment recurrence.
  const auto mu = exp_moments(sigma, 2 * q);
  for (int k = 0; k <= 2 * q; ++k) {
    double s = 0.0;
    for (int i = 0; i <= q; ++i)
      s += rule->weights[i] * std::pow(rule->nodes[i], k);
    if (std::abs(s - mu[k]) > 1e-11 * std::max(1.0, std::abs(mu[k])))
      throw std::runtime_error(
          "weighted Radau rule: moment self-check failed (q=" +
          std::to_string(q) + ", sigma=" + std::to_string(sigma) + ")");
  }
  return rule;
}

}  // namespace

std::vector<double> exp_moments(double sigma, int kmax) {
  if (kmax < 0) throw std::invalid_argument("exp_moments: kmax < 0");
  if (!(sigma >= 0.0)) throw std::invalid_argument("exp_moments: sigma < 0");
  std::vector<double> mu(kmax + 1);
  if (sigma == 0.0) {
    for (int k = 0; k <= kmax; ++k) mu[k] = 1.0 / (k + 1);
    return mu;
  }
  const double s2 = 2.0 * sigma;
  const double e = std::exp(-s2);
  mu[0] = -std::expm1(-s2) / s2;
  // Forward recurrence is contractive while k <= 2 sigma.
  const int k_fwd = std::min(kmax, static_cast<int>(std::floor(s2)));
  for (int k = 1; k <= k_fwd; ++k) mu[k] = (k * mu[k - 1] - e) / s2;
  if (k_fwd < kmax) {
    // Seed mu_kmax by the positive series
    //   mu_K = e^{-2 sigma} sum_j (2 sigma)^j K! / (K+1+j)!
    // then run the contractive backward recurrence.
    const int K = kmax;
    double term = 1.0 / (K + 1);
    double sum = term;
    for (int j = 0; j < 400; ++j) {
      term *= s2 / (K + 2 + j);
      sum += term;
      if (term < 1e-20 * sum) break;
    }
    mu[K] = e * sum;
    for (int k = K; k > k_fwd + 1; --k) mu[k - 1] = (s2 * mu[k] + e) / k;
  }
  return mu;
}

std::shared_ptr<const WeightedRadauRule> build_weighted_radau(int q,
                                                              double sigma) {
  if (q < 0 || q > kMaxDegree)
    throw std::invalid_argument("build_weighted_radau: q out of [0," +
                                std::to_string(kMaxDegree) + "]");
  if (!(sigma >= 0.0) || sigma > kMaxSigma + 1e-12)
    throw std::invalid_argument(
        "build_weighted_radau: sigma out of the stable range [0," +
        std::to_string(kMaxSigma) + "]");

  static std::mutex mtx;
  static std::map<std::pair<int, long long>,
                  std::shared_ptr<const WeightedRadauRule>>
      cache;
  const std::pair<int, long long> key{q, std::llround(sigma * 1e14)};
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  auto rule = make_weighted_radau(q, sigma);
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(key, std::move(rule)).first->second;
}

double SlabRule::sum(const std::vector<double>& values) const {
  if (values.size() != weights.size())
    throw std::invalid_argument("SlabRule::sum: size mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

SlabRule map_to_slab(std::shared_ptr<const WeightedRadauRule> rule,
                     double t_left, double tau, double rho) {
  if (!rule) throw std::invalid_argument("map_to_slab: null rule");
  if (!(tau > 0.0)) throw std::invalid_argument("map_to_slab: tau <= 0");
  const double sigma_slab = rho * tau;
  if (std::abs(rule->sigma - sigma_slab) >
      1e-12 * std::max(1.0, std::abs(rule->sigma)))
    throw std::invalid_argument(
        "map_to_slab: rule sigma does not match rho * tau");
  SlabRule s;
  s.ref = std::move(rule);
  s.t_left = t_left;
  s.tau = tau;
  s.rho = rho;
  const int n = s.ref->q + 1;
  s.nodes.resize(n);
  s.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    s.nodes[i] = t_left + tau * s.ref->nodes[i];
    s.weights[i] = tau * s.ref->weights[i];
  }
  s.nodes[n - 1] = t_left + tau;  // exact right endpoint
  return s;
}

LagrangeBasis::LagrangeBasis(std::shared_ptr<const WeightedRadauRule> rule)
    : rule_(std::move(rule)) {
  if (!rule_) throw std::invalid_argument("LagrangeBasis: null rule");
  nodes_ = rule_->nodes;
  const int n = static_cast<int>(nodes_.size());
  bary_.assign(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (j != i) bary_[i] /= (nodes_[i] - nodes_[j]);
  diff_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      diff_(i, j) = (bary_[j] / bary_[i]) / (nodes_[i] - nodes_[j]);
      row += diff_(i, j);
    }
    diff_(i, i) = -row;
  }
  left_values_ = values(0.0);
}

void LagrangeBasis::values(double s, double* out) const {
  const int n = static_cast<int>(nodes_.size());
  for (int i = 0; i < n; ++i) {
    if (std::abs(s - nodes_[i]) < 1e-14) {
      for (int j = 0; j < n; ++j) out[j] = (j == i) ? 1.0 : 0.0;
      return;
    }
  }
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = bary_[i] / (s - nodes_[i]);
    denom += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= denom;
}

std::vector<double> LagrangeBasis::values(double s) const {
  std::vector<double> out(nodes_.size());
  values(s, out.data());
  return out;
}

double LagrangeBasis::interpolate(const std::vector<double>& samples,
                                  double s) const {
  if (samples.size() != nodes_.size())
    throw std::invalid_argument("LagrangeBasis::interpolate: size mismatch");
  const auto l = values(s);
  double acc = 0.0;
  for (size_t i = 0; i < l.size(); ++i) acc += l[i] * samples[i];
  return acc;
}

double ThetaPoly::value(double s) const {
  double p = 1.0;
  for (double n : nodes) p *= (s - n);
  return p / denom;
}

double ThetaPoly::derivative(double s) const {
  // d/ds prod_i (s - s_i) = sum_i prod_{j != i} (s - s_j); stable at nodes.
  const int n = static_cast<int>(nodes.size());
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double p = 1.0;
    for (int j = 0; j < n; ++j)
      if (j != i) p *= (s - nodes[j]);
    acc += p;
  }
  return acc / denom;
}

std::vector<double> ThetaPoly::coefficients() const {
  std::vector<double> c{1.0};  // coefficients of prod (s - s_i), ascending
  for (double n : nodes) {
    c.push_back(0.0);
    for (int i = static_cast<int>(c.size()) - 1; i > 0; --i)
      c[i] = c[i - 1] - n * c[i];
    c[0] *= -n;
  }
  for (double& v : c) v /= denom;
  return c;
}

ThetaPoly build_theta(const WeightedRadauRule& rule) {
  ThetaPoly theta;
  theta.q = rule.q;
  theta.nodes = rule.nodes;
  theta.denom = 1.0;
  for (double n : rule.nodes) theta.denom *= (0.0 - n);
  return theta;
}

std::shared_ptr<const GaussRule> gauss_legendre(int n) {
  if (n < 1 || n > 200)
    throw std::invalid_argument("gauss_legendre: n out of range");
  static std::mutex mtx;
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<GaussRule>(make_gauss_legendre(n));
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(n, std::move(rule)).first->second;
}

std::shared_ptr<const GaussRule> gauss_jacobi10(int n) {
  if (n < 1 || n > 100)
    throw std::invalid_argument("gauss_jacobi10: n out of range");
  static std::mutex mtx;
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  // The weight (1-s) is a polynomial, so a Gauss-Legendre discretization of
  // sufficient order makes the Stieltjes inner products exact.
  const auto gl = gauss_legendre(std::max(48, 2 * n + 4));
  const int m = static_cast<int>(gl->nodes.size());
  std::vector<double> omega(m);
  for (int l = 0; l < m; ++l)
    omega[l] = gl->weights[l] * (1.0 - gl->nodes[l]);
  std::vector<double> alpha, beta;
  stieltjes(gl->nodes, omega, n, alpha, beta);
  auto rule = std::make_shared<GaussRule>(golub_welsch(alpha, beta));
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(n, std::move(rule)).first->second;
}

std::shared_ptr<const TriRule> tri_quadrature(int degree) {
  if (degree < 0 || degree > 60)
    throw std::invalid_argument("tri_quadrature: degree out of range");
  static std::mutex mtx;
  static std::map<int, std::shared_ptr<const TriRule>> cache;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(degree);
    if (it != cache.end()) return it->second;
  }
  // Collapse the triangle onto a square: y = (1-x) t turns the integral into
  // a (1-x)-weighted rule in x times a plain Gauss rule in t.
  const int n = degree / 2 + 1;
  const auto gj = gauss_jacobi10(n);
  const auto gl = gauss_legendre(n);
  auto rule = std::make_shared<TriRule>();
  rule->x.reserve(n * n);
  rule->y.reserve(n * n);
  rule->w.reserve(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      rule->x.push_back(gj->nodes[i]);
      rule->y.push_back((1.0 - gj->nodes[i]) * gl->nodes[j]);
      rule->w.push_back(gj->weights[i] * gl->weights[j]);
    }
  }
  std::lock_guard<std::mutex> lock(mtx);
  return cache.emplace(degree, std::move(rule)).first->second;
}

}  // namespace stdg
