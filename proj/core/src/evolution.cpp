// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "stdg/evolution.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>

namespace stdg {

TimeMesh TimeMesh::uniform(double t_end, int n_slabs) {
  if (!(t_end > 0.0) || n_slabs < 1)
    throw std::invalid_argument("time mesh: need t_end > 0 and n >= 1");
  TimeMesh tm;
  tm.nodes.resize(n_slabs + 1);
  for (int m = 0; m <= n_slabs; ++m) tm.nodes[m] = t_end * m / n_slabs;
  tm.nodes[n_slabs] = t_end;
  return tm;
}

Eigen::VectorXd DiscreteSolution::start_value(int m) const {
  const auto& l0 = bases[m]->left_values();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_dofs());
  for (int i = 0; i <= q; ++i) out += l0[i] * coeff[m].col(i);
  return out;
}

Eigen::VectorXd DiscreteSolution::jump(int m) const {
  if (m == 0) return start_value(0) - x0;
  return start_value(m) - coeff[m - 1].col(q);
}

int DiscreteSolution::slab_of(double t, bool from_left) const {
  const auto& tn = tmesh.nodes;
  const double eps = 1e-12 * std::max(1.0, tmesh.t_end());
  if (t < tn.front() - eps || t > tn.back() + eps)
    throw std::invalid_argument("eval: time outside the marched interval");
  t = std::clamp(t, tn.front(), tn.back());
  // from_left: t in (t_m, t_{m+1}]; otherwise t in [t_m, t_{m+1}).
  auto it = from_left ? std::lower_bound(tn.begin(), tn.end(), t)
                      : std::upper_bound(tn.begin(), tn.end(), t);
  int m = static_cast<int>(it - tn.begin()) - 1;
  return std::clamp(m, 0, n_slabs() - 1);
}

Eigen::VectorXd DiscreteSolution::eval(double t, bool from_left) const {
  if (from_left && t <= tmesh.nodes.front()) return x0;
  const int m = slab_of(t, from_left);
  const double s = (t - tmesh.nodes[m]) / tmesh.tau(m);
  const auto ell = bases[m]->values(std::clamp(s, 0.0, 1.0));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n_dofs());
  for (int i = 0; i <= q; ++i) out += ell[i] * coeff[m].col(i);
  return out;
}

Eigen::VectorXd LiftedSolution::eval(double t, bool from_left) const {
  return std::exp(rho * t) * base->eval(t, from_left);
}

LiftedSolution lift_exponential(std::shared_ptr<const DiscreteSolution> base) {
  if (!base) throw std::invalid_argument("lift: null trajectory");
  return LiftedSolution{base, base->rho};
}

namespace {

// Linear solver for one slab geometry: x solves the stacked (q+1)n system
// with temporal matrix kmat and stationary part tau * w_i * B per node.
class SlabSystemSolver {
 public:
  virtual ~SlabSystemSolver() = default;
  virtual Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const = 0;
};

class CoupledSolver : public SlabSystemSolver {
 public:
  CoupledSolver(const Eigen::MatrixXd& kmat, const std::vector<double>& w,
                double tau, const SpMat& m0, const SpMat& b) {
    const Eigen::Index n = m0.rows();
    const int nodes = static_cast<int>(kmat.rows());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(nodes * nodes) * m0.nonZeros() +
                  static_cast<std::size_t>(nodes) * b.nonZeros());
    for (int i = 0; i < nodes; ++i) {
      for (int j = 0; j < nodes; ++j) {
        if (kmat(i, j) != 0.0) add_block(trips, m0, i * n, j * n, kmat(i, j));
      }
      add_block(trips, b, i * n, i * n, tau * w[static_cast<std::size_t>(i)]);
    }
    mat_ = compose(nodes * n, trips);
    lu_.compute(mat_);
    if (lu_.info() != Eigen::Success)
      throw std::runtime_error("march: slab matrix factorization failed");
  }

  // One step of iterative refinement: marching accumulates the per-slab
  // solve noise over hundreds of slabs, and the refined residual keeps the
  // floor of the smallest measurable errors near machine precision.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    Eigen::VectorXd x = lu_.solve(rhs);
    x += lu_.solve(Eigen::VectorXd(rhs - mat_ * x));
    return x;
  }

 private:
  SpMat mat_;
  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
};

// Eigendecomposes C = diag(w)^{-1} K and solves (lambda_i M0 + tau B) per
// eigenvalue.  Conjugate eigenvalue pairs reuse one complex factorization;
// real eigenvalues get a real one.  Memory stays O(q) factors of size n
// instead of one factor of size (q+1)n.
class DiagonalizedSolver : public SlabSystemSolver {
  using CSpMat = Eigen::SparseMatrix<std::complex<double>>;

 public:
  // Throws std::domain_error when the temporal matrix resists a
  // well-conditioned eigendecomposition; callers then fall back.
  DiagonalizedSolver(const Eigen::MatrixXd& kmat, const std::vector<double>& w,
                     double tau, const SpMat& m0, const SpMat& b)
      : n_(m0.rows()), nodes_(static_cast<int>(kmat.rows())) {
    Eigen::MatrixXd c(nodes_, nodes_);
    for (int i = 0; i < nodes_; ++i) {
      const double wi = w[static_cast<std::size_t>(i)];
      if (!(wi > 0.0)) throw std::domain_error("nonpositive rule weight");
      c.row(i) = kmat.row(i) / wi;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(c);
    if (es.info() != Eigen::Success)
      throw std::domain_error("temporal eigendecomposition failed");
    lambda_ = es.eigenvalues();
    s_ = es.eigenvectors();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s_);
    const double smin = svd.singularValues().minCoeff();
    if (!(smin > 1e-8 * svd.singularValues().maxCoeff()))
      throw std::domain_error("temporal eigenvector basis ill conditioned");
    s_inv_ = s_.inverse();
    weights_ = w;

    conj_of_.assign(static_cast<std::size_t>(nodes_), -1);
    real_lu_.resize(static_cast<std::size_t>(nodes_));
    cplx_lu_.resize(static_cast<std::size_t>(nodes_));
    for (int i = 0; i < nodes_; ++i) {
      const std::complex<double> li = lambda_(i);
      const double scale = std::max(1.0, std::abs(li));
      if (conj_of_[static_cast<std::size_t>(i)] >= 0) continue;
      if (std::abs(li.imag()) <= 1e-12 * scale) {
        SpMat f = li.real() * m0 + tau * b;
        auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
        lu->compute(f);
        if (lu->info() != Eigen::Success)
          throw std::runtime_error("march: slab matrix factorization failed");
        real_lu_[static_cast<std::size_t>(i)] = std::move(lu);
        continue;
      }
      // Link the matching conjugate eigenvalue to this factorization when
      // its eigenvector column is the conjugate column as well.
      for (int j = i + 1; j < nodes_; ++j) {
        if (conj_of_[static_cast<std::size_t>(j)] >= 0 ||
            real_lu_[static_cast<std::size_t>(j)] ||
            cplx_lu_[static_cast<std::size_t>(j)])
          continue;
        const bool value_match = std::abs(lambda_(j) - std::conj(li)) <=
                                 1e-10 * scale;
        const bool vector_match =
            (s_.col(j) - s_.col(i).conjugate()).norm() <=
            1e-10 * s_.col(i).norm();
        if (value_match && vector_match) {
          conj_of_[static_cast<std::size_t>(j)] = i;
          break;
        }
      }
      CSpMat f = li * m0.cast<std::complex<double>>() +
                 std::complex<double>(tau, 0.0) *
                     b.cast<std::complex<double>>();
      auto lu = std::make_unique<Eigen::SparseLU<CSpMat>>();
      lu->compute(f);
      if (lu->info() != Eigen::Success)
        throw std::runtime_error("march: slab matrix factorization failed");
      cplx_lu_[static_cast<std::size_t>(i)] = std::move(lu);
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const override {
    std::vector<Eigen::VectorXcd> g(static_cast<std::size_t>(nodes_));
    for (int i = 0; i < nodes_; ++i) {
      g[static_cast<std::size_t>(i)] = Eigen::VectorXcd::Zero(n_);
      for (int j = 0; j < nodes_; ++j)
        g[static_cast<std::size_t>(i)] +=
            s_inv_(i, j) / weights_[static_cast<std::size_t>(j)] *
            rhs.segment(j * n_, n_);
    }
    std::vector<Eigen::VectorXcd> y(static_cast<std::size_t>(nodes_));
    for (int i = 0; i < nodes_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (real_lu_[ui]) {
        y[ui] = real_lu_[ui]->solve(g[ui].real().eval()) +
                std::complex<double>(0.0, 1.0) *
                    real_lu_[ui]->solve(g[ui].imag().eval());
      } else if (cplx_lu_[ui]) {
        y[ui] = cplx_lu_[ui]->solve(g[ui]);
      }
    }
    for (int i = 0; i < nodes_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (conj_of_[ui] >= 0)
        y[ui] = y[static_cast<std::size_t>(conj_of_[ui])].conjugate();
    }
    Eigen::VectorXd out(nodes_ * n_);
    for (int i = 0; i < nodes_; ++i) {
      Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(n_);
      for (int j = 0; j < nodes_; ++j)
        xi += s_(i, j) * y[static_cast<std::size_t>(j)];
      out.segment(i * n_, n_) = xi.real();
    }
    return out;
  }

 private:
  Eigen::Index n_;
  int nodes_;
  Eigen::VectorXcd lambda_;
  Eigen::MatrixXcd s_, s_inv_;
  std::vector<double> weights_;
  std::vector<int> conj_of_;
  std::vector<std::unique_ptr<Eigen::SparseLU<SpMat>>> real_lu_;
  std::vector<std::unique_ptr<Eigen::SparseLU<CSpMat>>> cplx_lu_;
};

// Coupled factorizations above this stacked size tend to exhaust desk-class
// memory on 2D problems; switch to the per-eigenvalue form there.
constexpr Eigen::Index kCoupledSizeLimit = 140000;

std::shared_ptr<const SlabSystemSolver> make_slab_solver(
    SlabSolver choice, const Eigen::MatrixXd& kmat,
    const std::vector<double>& w, double tau, const SpMat& m0, const SpMat& b) {
  const Eigen::Index stacked = kmat.rows() * m0.rows();
  const bool diag = choice == SlabSolver::diagonalized ||
                    (choice == SlabSolver::automatic &&
                     stacked > kCoupledSizeLimit);
  if (diag) {
    try {
      return std::make_shared<DiagonalizedSolver>(kmat, w, tau, m0, b);
    } catch (const std::domain_error&) {
      // Temporal matrix would not diagonalize cleanly; the coupled form
      // below handles it at higher memory cost.
    }
  }
  return std::make_shared<CoupledSolver>(kmat, w, tau, m0, b);
}

}  // namespace

DiscreteSolution march(const EvolutionaryProblem& prob, const TimeMesh& tmesh,
                       int q, double rho, Variant variant, SlabSolver solver) {
  if (!prob.ops) throw std::invalid_argument("march: missing operators");
  const auto& ops = *prob.ops;
  const Eigen::Index n = ops.n();
  if (prob.x0.size() != n)
    throw std::invalid_argument("march: x0 size mismatch");
  if (!(rho >= prob.rho0))
    throw std::invalid_argument("march: rho below the admissible rate rho0");

  // Operational admissibility: the scheme's coercivity rests on
  // rho*M0 + M1 being positive definite.
  {
    SpMat gram = rho * ops.m0 + ops.m1;
    Eigen::SimplicialLLT<SpMat> llt(gram);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument(
          "march: rho*M0 + M1 is not positive definite; increase rho");
  }

  // Stationary part of the slab operator.
  const SpMat b = (variant == Variant::transformed)
                      ? SpMat(rho * ops.m0 + ops.m1 + ops.a)
                      : SpMat(ops.m1 + ops.a);

  DiscreteSolution sol;
  sol.variant = variant;
  sol.rho = rho;
  sol.q = q;
  sol.tmesh = tmesh;
  sol.x0 = prob.x0;
  const int slabs = tmesh.n_slabs();
  sol.rules.resize(slabs);
  sol.bases.resize(slabs);
  sol.coeff.resize(slabs);

  std::map<const WeightedRadauRule*, std::shared_ptr<const LagrangeBasis>>
      basis_cache;
  // One factorization per distinct (tau, sigma); equidistant slabs reuse it.
  std::map<std::pair<long long, long long>,
           std::shared_ptr<const SlabSystemSolver>>
      factors;

  Eigen::VectorXd u_prev = prob.x0;
  for (int m = 0; m < slabs; ++m) {
    const double tau = tmesh.tau(m);
    const double sigma = (variant == Variant::weighted) ? rho * tau : 0.0;
    auto rule = build_weighted_radau(q, sigma);
    sol.rules[m] = rule;
    auto& basis = basis_cache[rule.get()];
    if (!basis) basis = std::make_shared<LagrangeBasis>(rule);
    sol.bases[m] = basis;

    const auto key = std::make_pair(std::llround(tau * 1e13),
                                    std::llround(sigma * 1e13));
    auto& factor = factors[key];
    if (!factor) {
      // Temporal stiffness K(i,j) = w_i l_j'(s_i) + l_i(0) l_j(0) couples the
      // nodes; the stationary part enters the diagonal node blocks scaled by
      // the mapped weights tau * w_i.
      const Eigen::MatrixXd& d = basis->diff();
      const auto& l0 = basis->left_values();
      Eigen::MatrixXd kmat(q + 1, q + 1);
      for (int i = 0; i <= q; ++i)
        for (int j = 0; j <= q; ++j)
          kmat(i, j) = rule->weights[i] * d(i, j) + l0[i] * l0[j];
      factor = make_slab_solver(solver, kmat, rule->weights, tau, ops.m0, b);
    }

    const Eigen::VectorXd m0_prev = ops.m0 * u_prev;
    const auto& l0 = basis->left_values();
    Eigen::VectorXd rhs((q + 1) * n);
    for (int i = 0; i <= q; ++i) {
      const double t_i = tmesh.nodes[m] + tau * rule->nodes[i];
      Eigen::VectorXd f = prob.rhs(t_i);
      if (f.size() != n) throw std::runtime_error("march: rhs size mismatch");
      if (variant == Variant::transformed) f *= std::exp(-rho * t_i);
      rhs.segment(i * n, n) = tau * rule->weights[i] * f + l0[i] * m0_prev;
    }

    const Eigen::VectorXd x = factor->solve(rhs);
    if (!x.allFinite())
      throw std::runtime_error("march: slab solve produced non-finite values");
    sol.coeff[m] = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, q + 1);
    u_prev = sol.coeff[m].col(q);
  }
  return sol;
}

}  // namespace stdg
