// Copyright 2026 the stdg authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not
// use this file except in compliance with the License. You may obtain a copy
// of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef STDG_ASSEMBLY_HPP
#define STDG_ASSEMBLY_HPP

#include <Eigen/Sparse>

#include <iosfwd>
#include <vector>

#include "stdg/fe_space.hpp"

namespace stdg {

using SpMat = Eigen::SparseMatrix<double>;

// Spatial operators of a two-component evolutionary system, all on the
// composite dof layout (u block first, then v).  m0 and m1 are symmetric
// positive semidefinite masses (typically indicator-weighted), a is skew
// symmetric; the marching and audit code relies on exactly this structure.
struct BlockOperator {
  SpMat m0, m1, a;
  Eigen::Index dim_u = 0, dim_v = 0;
  Eigen::Index n() const { return dim_u + dim_v; }
};

// Mass limited to cells carrying `tag` (tag = -1 integrates everywhere).
SpMat assemble_mass_1d(const LagrangeSpace1d& sp, int tag = -1);
SpMat assemble_mass_p2d(const LagrangeSpace2d& sp, int tag = -1);
SpMat assemble_mass_rt2d(const RtSpace2d& sp, int tag = -1);

// First-order couplings feeding the skew block [[0, C], [-C^T, 0]]:
// 1D: C(i,j) = integral of cols_j'(x) rows_i(x),
// 2D: C(i,j) = integral of div(cols_j) rows_i.
SpMat assemble_deriv_1d(const LagrangeSpace1d& rows,
                        const LagrangeSpace1d& cols);
SpMat assemble_div_coupling_2d(const LagrangeSpace2d& rows,
                               const RtSpace2d& cols);

// Scatter `block`, scaled, into a composite triplet list at (row0, col0).
void add_block(std::vector<Eigen::Triplet<double>>& out, const SpMat& block,
               Eigen::Index row0, Eigen::Index col0, double scale = 1.0);

SpMat compose(Eigen::Index n, const std::vector<Eigen::Triplet<double>>& t);

// One "row col value" line per structural nonzero, deterministic order.
void write_triplets(std::ostream& os, const SpMat& m);

}  // namespace stdg

#endif  // STDG_ASSEMBLY_HPP
