// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "stdg/problems.hpp"

using namespace stdg;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;

Eigen::VectorXd random_state(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = gauss(rng);
  return c;
}
}  // namespace

TEST_CASE("example 1: construction guards and dof layout") {
  CHECK_THROWS_AS(example1(10, 1), std::invalid_argument);
  CHECK_THROWS_AS(example1(12, 0), std::invalid_argument);
  const auto p = example1(192, 1);
  CHECK(p.evo().ops->dim_u == 191);  // P1 with both boundary dofs removed
  CHECK(p.evo().ops->dim_v == 193);
  CHECK(p.dim() == 1);
  CHECK(p.n_components() == 2);
}

TEST_CASE("example 1: pointwise anchors of the exact solution") {
  const auto p = example1(12, 1);
  Eigen::VectorXd x(1);
  x << -kPi;
  CHECK(p.exact_at(1.0, x)[0] == doctest::Approx(kE - 1).epsilon(1e-12));
  x << kPi;
  CHECK(p.exact_at(1.0, x)[0] == doctest::Approx(-(kE - 1)).epsilon(1e-12));
  x << kPi / 2;
  CHECK(p.exact_at(1.0, x)[1] == doctest::Approx(kPi / 2).epsilon(1e-12));
  x << -1.0;  // hyperbolic side: v = -(e^t - t - 1) sin(x)
  CHECK(p.exact_at(1.0, x)[1] ==
        doctest::Approx(-(kE - 2) * std::sin(-1.0)).epsilon(1e-12));
  // u vanishes at t = 0 and on the boundary.
  x << 1.3;
  CHECK(p.exact_at(0.0, x)[0] == 0.0);
  x << 1.5 * kPi;
  CHECK(std::abs(p.exact_at(1.0, x)[0]) <= 1e-12);
}

TEST_CASE("example 1: error quadrature matches closed-form norms") {
  const auto p = example1(24, 2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.evo().ops->n());
  // || U(1) ||^2 over the full domain, assembled piece by piece.
  const double u_sq = (kE - 1) * (kE - 1) * 1.5 * kPi;
  const double v_hyp_sq = (kE - 2) * (kE - 2) * 0.75 * kPi;
  const double v_par_sq = 5.0 * std::pow(kPi, 3) / 8.0;
  CHECK(p.exact_err2(1.0, zero, false) ==
        doctest::Approx(u_sq + v_hyp_sq + v_par_sq).epsilon(1e-10));
  CHECK(p.exact_err2(1.0, zero, true) ==
        doctest::Approx(u_sq + v_hyp_sq).epsilon(1e-10));
}

TEST_CASE("example 1: quadrature cache consistent with assembled grams") {
  const auto p = example1(18, 3);
  const Eigen::VectorXd c = random_state(p.evo().ops->n(), 99);
  // scale = 0 wipes the exact fields, leaving the squared FE norm.
  CHECK(p.exact_err2(0.37, c, false, 0.0) ==
        doctest::Approx(c.dot(p.gram() * c)).epsilon(1e-12));
  CHECK(p.exact_err2(0.37, c, true, 0.0) ==
        doctest::Approx(c.dot(p.m0() * c)).epsilon(1e-12));
}

TEST_CASE("example 1: initial state is stationary and M0-orthogonal") {
  const auto p = example1(24, 2);
  const Eigen::VectorXd x0 = p.evo().x0;
  CHECK(x0.dot(p.m0() * x0) <= 1e-18);
  // The static hat is piecewise linear with mesh-aligned kinks, so the
  // interpolation at t = 0 is exact.
  CHECK(p.exact_err2(0.0, x0, false) <= 1e-18);
  CHECK(p.compatibility_residual() <= 1e-12);
}

TEST_CASE("example 1: hand-derived right-hand side passes the operator check") {
  const auto p = example1(12, 1);
  CHECK(p.fd_residual(100, 20260814u) <= 1e-6);
}

TEST_CASE("example 2: construction guards and anchors") {
  CHECK_THROWS_AS(example2(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(example2(4, 0), std::invalid_argument);
  const auto p = example2(4, 1);
  CHECK(p.dim() == 2);
  CHECK(p.n_components() == 3);

  Eigen::VectorXd x(2);
  x << -0.5, 0.0;
  CHECK(p.exact_at(1.0, x)[0] ==
        doctest::Approx((kE - 1) * std::cos(kPi / 4)).epsilon(1e-12));
  // Normal trace of v is continuous across x = 0 (value y there).
  x << 0.0, -0.5;
  const double right = p.exact_at(1.0, x)[1];
  x << -1e-13, -0.5;
  const double left = p.exact_at(1.0, x)[1];
  CHECK(right == doctest::Approx((kE - 2) * -0.5).epsilon(1e-12));
  CHECK(left == doctest::Approx(right).epsilon(1e-9));
  // Dirichlet condition of u on all four sides.
  for (double s : {-1.0, 1.0}) {
    x << s, 0.3;
    CHECK(std::abs(p.exact_at(1.0, x)[0]) <= 1e-12);
    x << 0.3, s;
    CHECK(std::abs(p.exact_at(1.0, x)[0]) <= 1e-12);
  }
}

TEST_CASE("example 2: error quadrature matches closed-form norms") {
  const auto p = example2(6, 2);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(p.evo().ops->n());
  const double u_sq = (kE - 1) * (kE - 1) * 5.0 / 9.0;
  const double v_sq = (kE - 2) * (kE - 2) * 181.0 / 90.0;
  CHECK(p.exact_err2(1.0, zero, false) ==
        doctest::Approx(u_sq + v_sq).epsilon(1e-10));
  const double u_hyp_sq = (kE - 1) * (kE - 1) / 3.0;
  const double v_hyp_sq = (kE - 2) * (kE - 2) * 31.0 / 30.0;
  CHECK(p.exact_err2(1.0, zero, true) ==
        doctest::Approx(u_hyp_sq + v_hyp_sq).epsilon(1e-10));
}

TEST_CASE("example 2: quadrature cache consistent with assembled grams") {
  const auto p = example2(4, 2);
  const Eigen::VectorXd c = random_state(p.evo().ops->n(), 7);
  CHECK(p.exact_err2(0.81, c, false, 0.0) ==
        doctest::Approx(c.dot(p.gram() * c)).epsilon(1e-12));
  CHECK(p.exact_err2(0.81, c, true, 0.0) ==
        doctest::Approx(c.dot(p.m0() * c)).epsilon(1e-12));
}

TEST_CASE("example 2: zero initial state, compatibility, operator check") {
  const auto p = example2(4, 2);
  CHECK(p.evo().x0.norm() == 0.0);
  CHECK(p.compatibility_residual() <= 1e-12);
  CHECK(p.fd_residual(100, 20260814u) <= 1e-6);
}

TEST_CASE("example 1: lowest-order march reproduces the reference errors") {
  // Published values of || U - U_rho ||_rho for k/q = 1/0 on the two
  // coarsest levels; this exercises the whole pipeline end to end.
  struct Level {
    int n;
    double rho1_err, rho2_err;
  };
  const Level levels[] = {{192, 5.462e-03, 3.347e-03},
                          {384, 2.730e-03, 1.675e-03}};
  std::vector<double> e1;
  for (const auto& lvl : levels) {
    const auto p = example1(lvl.n, 1);
    const TimeMesh tm = TimeMesh::uniform(1.0, lvl.n);
    const auto sol1 = march(p.evo(), tm, 0, 1.0, Variant::weighted);
    const double err1 =
        weighted_l2_error(spec_of(sol1), p.error_sq(), 1.0, 5);
    CHECK(err1 == doctest::Approx(lvl.rho1_err).epsilon(0.10));
    e1.push_back(err1);

    const auto sol2 = march(p.evo(), tm, 0, 2.0, Variant::weighted);
    const double err2 =
        weighted_l2_error(spec_of(sol2), p.error_sq(), 2.0, 5);
    CHECK(err2 == doctest::Approx(lvl.rho2_err).epsilon(0.10));
  }
  CHECK(eoc(e1)[0] == doctest::Approx(1.00).epsilon(0.1));
}
