// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

#include <Eigen/Sparse>

#include "surfhodge/fespace.hpp"

namespace surfhodge {

/// Global operators are Eigen compressed sparse matrices (column major,
/// sorted unique indices after makeCompressed).
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class WallCondition { NoSlip, FreeSlip };

/// Gram matrix of the space basis in L2(M_h).
SparseMatrix assemble_mass(const FeSpace& space);

/// Gram matrix of the tangential gradients (scalar spaces).
SparseMatrix assemble_stiffness(const FeSpace& S);

/// Column j holds the BDM coefficients of rot(phi_j), phi_j in S.
/// Requires S = Lagrange(k+1) and V = BDM(k) on the same mesh.
SparseMatrix assemble_rot_embedding(const FeSpace& S, const FeSpace& V);

/// B(i, j) = (div v_j, q_i). Requires Q = DGPressure(max(k-1, 0)).
SparseMatrix assemble_div(const FeSpace& V, const FeSpace& Q);

/// Default SIP penalty for BDM degree k.
double default_penalty(int k);

/// Symmetric interior penalty form on V with viscosity mu and penalty alpha.
SparseMatrix assemble_sip(const FeSpace& V, double mu, double alpha, WallCondition wall = WallCondition::NoSlip);

/// Upwind convection matrix C(w) with C(i, j) = c_h(w; phi_j, phi_i).
/// Throws NotDivergenceFree if ||div w|| > div_tol * ||w|| / h_min.
SparseMatrix assemble_convection(const FeSpace& V, const FeField& w, double div_tol = 1e-8);

/// f_h(v_i) = (f, v_i) for the tangential part of f.
Eigen::VectorXd assemble_load(const FeSpace& V, const VectorFunction& f);
Eigen::VectorXd assemble_load(const FeSpace& S, const ScalarFunction& f);

/// m_i = integral of basis function i (scalar spaces).
Eigen::VectorXd assemble_mean(const FeSpace& S);

/// Exact inclusion BDM(k) -> BDM(m), m >= k: column j holds the target
/// coefficients of source basis function j.
SparseMatrix assemble_bdm_transfer(const FeSpace& from, const FeSpace& to);

/// L2 norm of the divergence of a BDM field.
double divergence_norm(const FeField& u);

/// max |A - A^T| / max |A| (0 for an empty matrix).
double symmetry_defect(const SparseMatrix& A);

/// MatrixMarket coordinate (real general) dump.
void write_matrix_market(std::ostream& out, const SparseMatrix& A);

}  // namespace surfhodge
