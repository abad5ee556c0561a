// Copyright The surfhodge Authors
// SPDX-License-Identifier: Apache-2.0

#include "surfhodge/linalg.hpp"

#include <cmath>
#include <string>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "surfhodge/error.hpp"

namespace surfhodge {

const char* to_string(FactorKind kind) {
  return kind == FactorKind::SPD ? "spd" : "symmetric-indefinite";
}

struct FactorizedOperator::Impl {
  SparseMatrix A;
  double a_norm = 0.0;
  Eigen::SimplicialLLT<SparseMatrix> llt;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
};

namespace {

double max_asymmetry(const SparseMatrix& A) {
  const SparseMatrix D = SparseMatrix(A.transpose()) - A;
  double worst = 0.0;
  for (int c = 0; c < D.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(D, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

double max_abs(const SparseMatrix& A) {
  double worst = 0.0;
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

}  // namespace

FactorizedOperator::FactorizedOperator(const SparseMatrix& A, FactorKind kind)
    : impl_(std::make_unique<Impl>()), dim_(static_cast<int>(A.rows())), kind_(kind),
      count_(std::make_unique<std::atomic<long>>(0)) {
  if (A.rows() != A.cols())
    throw Error(Errc::DimensionMismatch,
                "matrix is " + std::to_string(A.rows()) + "x" + std::to_string(A.cols()) + ", expected square");
  impl_->A = A;
  impl_->A.makeCompressed();
  impl_->a_norm = impl_->A.norm();
  if (dim_ == 0) return;
  if (kind == FactorKind::SPD) {
    if (max_asymmetry(impl_->A) > 1e-12 * max_abs(impl_->A))
      throw Error(Errc::NotSPD, "matrix is not symmetric");
    impl_->llt.compute(impl_->A);
    if (impl_->llt.info() != Eigen::Success) throw Error(Errc::NotSPD, "Cholesky factorization hit a nonpositive pivot");
    const auto& d = impl_->llt.matrixL().nestedExpression().diagonal();
    if (d.minCoeff() <= 1e-8 * d.maxCoeff()) throw Error(Errc::SingularMatrix, "Cholesky factor is numerically singular");
  } else {
    impl_->lu.analyzePattern(impl_->A);
    impl_->lu.factorize(impl_->A);
    if (impl_->lu.info() != Eigen::Success)
      throw Error(Errc::SingularMatrix, "LU factorization failed: " + impl_->lu.lastErrorMessage());
    // LU rarely meets an exact zero pivot, so estimate ||A^-1|| by inverse iteration
    Eigen::VectorXd x(dim_);
    for (int i = 0; i < dim_; ++i) x(i) = std::sin(1.0 + i);
    double growth = 0.0;
    for (int it = 0; it < 3; ++it) {
      x /= x.norm();
      x = impl_->lu.solve(x);
      if (!x.allFinite()) throw Error(Errc::SingularMatrix, "LU factor is numerically singular");
      growth = x.norm();
    }
    const double scale = impl_->A.cwiseAbs().sum() / std::sqrt(static_cast<double>(dim_));
    if (growth * scale > 1e14) throw Error(Errc::SingularMatrix, "matrix is numerically singular");
  }
}

FactorizedOperator::~FactorizedOperator() = default;
FactorizedOperator::FactorizedOperator(FactorizedOperator&&) noexcept = default;
FactorizedOperator& FactorizedOperator::operator=(FactorizedOperator&&) noexcept = default;

Eigen::VectorXd FactorizedOperator::solve(const Eigen::VectorXd& b) const {
  if (b.size() != dim_)
    throw Error(Errc::DimensionMismatch,
                "right-hand side has length " + std::to_string(b.size()) + ", expected " + std::to_string(dim_));
  count_->fetch_add(1);
  if (dim_ == 0) return {};
  Eigen::VectorXd x;
  if (kind_ == FactorKind::SPD) {
    x = impl_->llt.solve(b);
  } else {
    x = impl_->lu.solve(b);
    // one step of iterative refinement
    const Eigen::VectorXd r = b - impl_->A * x;
    x += impl_->lu.solve(r);
  }
  if (!x.allFinite()) throw Error(Errc::SolverFailure, "solution contains non-finite entries");
  const double res = (impl_->A * x - b).norm();
  if (res > 1e-8 * (impl_->a_norm * x.norm() + b.norm()))
    throw Error(Errc::SolverFailure, "residual " + std::to_string(res) + " too large; matrix is likely singular");
  return x;
}

Eigen::MatrixXd FactorizedOperator::solve_many(const Eigen::MatrixXd& B) const {
  Eigen::MatrixXd X(B.rows(), B.cols());
  for (int j = 0; j < B.cols(); ++j) X.col(j) = solve(Eigen::VectorXd(B.col(j)));
  return X;
}

FactorizedOperator factorize(const SparseMatrix& A, FactorKind kind) { return FactorizedOperator(A, kind); }

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double denom = A.norm() * x.norm() + b.norm();
  const double res = (A * x - b).norm();
  return denom > 0 ? res / denom : res;
}

SparseMatrix bordered(const SparseMatrix& A, const Eigen::VectorXd& m) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n || m.size() != n) throw Error(Errc::DimensionMismatch, "bordered system dimensions disagree");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(A.nonZeros() + 2 * n);
  for (int c = 0; c < A.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A, c); it; ++it) trips.emplace_back(it.row(), it.col(), it.value());
  for (int i = 0; i < n; ++i) {
    if (m(i) == 0.0) continue;
    trips.emplace_back(i, n, m(i));
    trips.emplace_back(n, i, m(i));
  }
  SparseMatrix out(n + 1, n + 1);
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Eigen::VectorXd solve_zero_mean(const SparseMatrix& A, const Eigen::VectorXd& m, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.rows());
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  rhs.head(n) = b;
  const FactorizedOperator op(bordered(A, m), FactorKind::SymmetricIndefinite);
  return op.solve(rhs).head(n);
}

SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks,
                          const std::vector<int>& row_sizes, const std::vector<int>& col_sizes) {
  if (blocks.size() != row_sizes.size()) throw Error(Errc::DimensionMismatch, "block row count mismatch");
  std::vector<int> row_off(row_sizes.size() + 1, 0), col_off(col_sizes.size() + 1, 0);
  for (size_t i = 0; i < row_sizes.size(); ++i) row_off[i + 1] = row_off[i] + row_sizes[i];
  for (size_t j = 0; j < col_sizes.size(); ++j) col_off[j + 1] = col_off[j] + col_sizes[j];
  std::vector<Eigen::Triplet<double>> trips;
  for (size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].size() != col_sizes.size()) throw Error(Errc::DimensionMismatch, "block column count mismatch");
    for (size_t j = 0; j < blocks[i].size(); ++j) {
      const SparseMatrix* B = blocks[i][j];
      if (!B) continue;
      if (B->rows() != row_sizes[i] || B->cols() != col_sizes[j])
        throw Error(Errc::DimensionMismatch, "block (" + std::to_string(i) + "," + std::to_string(j) + ") has wrong shape");
      for (int c = 0; c < B->outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(*B, c); it; ++it)
          trips.emplace_back(row_off[i] + it.row(), col_off[j] + it.col(), it.value());
    }
  }
  SparseMatrix out(row_off.back(), col_off.back());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

double m_inner(const SparseMatrix& M, const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.dot(M * y); }

double m_norm(const SparseMatrix& M, const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, m_inner(M, x, x))); }

Eigen::VectorXd m_orthogonalize(const Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis,
                                const SparseMatrix& M) {
  Eigen::VectorXd w = v;
  for (int pass = 0; pass < 2; ++pass)
    for (const Eigen::VectorXd& q : basis) w -= m_inner(M, q, w) * q;
  return w;
}

GramSchmidtResult gram_schmidt(const std::vector<Eigen::VectorXd>& vectors, const SparseMatrix& M, double tol) {
  GramSchmidtResult out;
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != M.rows()) throw Error(Errc::DimensionMismatch, "vector length does not match the mass matrix");
    Eigen::VectorXd w = m_orthogonalize(vectors[i], out.vectors, M);
    const double norm = m_norm(M, w);
    if (norm < tol) {
      out.dropped.push_back(static_cast<int>(i));
      continue;
    }
    out.vectors.push_back(w / norm);
  }
  return out;
}

Eigen::MatrixXd gram_matrix(const std::vector<Eigen::VectorXd>& vectors, const SparseMatrix& M) {
  const int n = static_cast<int>(vectors.size());
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd Mv = M * vectors[i];
    for (int j = 0; j < n; ++j) G(j, i) = vectors[j].dot(Mv);
  }
  return G;
}

}  // namespace surfhodge
