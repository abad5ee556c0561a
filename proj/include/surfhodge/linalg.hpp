// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace surfhodge {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class FactorKind { SPD, SymmetricIndefinite };

const char* to_string(FactorKind kind);

/// Sparse direct factorization (Cholesky for SPD, LU otherwise).
/// Immutable after construction; solve() may be called concurrently.
class FactorizedOperator {
 public:
  FactorizedOperator(const SparseMatrix& A, FactorKind kind);
  ~FactorizedOperator();
  FactorizedOperator(FactorizedOperator&&) noexcept;
  FactorizedOperator& operator=(FactorizedOperator&&) noexcept;

  int dim() const { return dim_; }
  FactorKind kind() const { return kind_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  /// One solve per column.
  Eigen::MatrixXd solve_many(const Eigen::MatrixXd& B) const;

  /// Number of right-hand sides solved so far.
  long solve_count() const { return count_->load(); }
  void reset_count() const { count_->store(0); }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int dim_ = 0;
  FactorKind kind_ = FactorKind::SPD;
  std::unique_ptr<std::atomic<long>> count_;
};

FactorizedOperator factorize(const SparseMatrix& A, FactorKind kind);

/// ||Ax - b|| / (||A|| ||x|| + ||b||) with the Frobenius norm for A.
double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

/// [[A, m], [m^T, 0]].
SparseMatrix bordered(const SparseMatrix& A, const Eigen::VectorXd& m);

/// Solves A x = b subject to m^T x = 0 through the bordered system.
Eigen::VectorXd solve_zero_mean(const SparseMatrix& A, const Eigen::VectorXd& m, const Eigen::VectorXd& b);

/// Block matrix from a dense layout of optional sparse blocks (empty = zero).
SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks,
                          const std::vector<int>& row_sizes, const std::vector<int>& col_sizes);

double m_inner(const SparseMatrix& M, const Eigen::VectorXd& x, const Eigen::VectorXd& y);
double m_norm(const SparseMatrix& M, const Eigen::VectorXd& x);

struct GramSchmidtResult {
  std::vector<Eigen::VectorXd> vectors;
  /// input indices that fell below the drop tolerance
  std::vector<int> dropped;
};

/// Modified Gram-Schmidt in the M inner product, each projection applied
/// twice. Vectors whose M-norm after orthogonalization is below tol are
/// dropped.
GramSchmidtResult gram_schmidt(const std::vector<Eigen::VectorXd>& vectors, const SparseMatrix& M,
                               double tol = 1e-8);

/// Orthogonalize v against an M-orthonormal set (twice) and return the
/// remainder.
Eigen::VectorXd m_orthogonalize(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis,
                                const SparseMatrix& M);

/// Gram matrix G(i, j) = (v_i, v_j)_M.
Eigen::MatrixXd gram_matrix(const std::vector<Eigen::VectorXd>& vectors, const SparseMatrix& M);

}  // namespace surfhodge
