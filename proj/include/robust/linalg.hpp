#pragma once

#include "robust/types.hpp"

namespace robust {

inline constexpr double kRankTol = 1e-10;
inline constexpr Index kDenseProjectorLimit = 5000;

/**
 * @brief Orthogonal projector onto the row space of a d x n design.
 *
 * Holds a thin Householder QR of X^T (X^T = Q R, Q is n x d). The Gram
 * matrix XX^T = R^T R is never inverted; P_X v is applied as Q (Q^T v).
 */
class Projector {
 public:
  /// Throws Error(RankDeficient) unless sigma_min(X) > kRankTol * sigma_max(X).
  explicit Projector(const MatrixXd& X);

  Index n() const { return q_.rows(); }
  Index d() const { return q_.cols(); }

  VectorXd apply(const VectorXd& v) const;
  VectorXd apply_complement(const VectorXd& v) const;

  /// (XX^T)^{-1} X v.
  VectorXd coefficients(const VectorXd& v) const;

  /// 0.5 * ||(I - P_X)(y - b)||^2.
  double objective(const VectorXd& y, const VectorXd& b) const;

  /// Dense n x n matrix; only for n <= kDenseProjectorLimit.
  MatrixXd dense() const;

  const MatrixXd& basis() const { return q_; }
  double condition() const { return cond_; }

 private:
  MatrixXd q_;
  MatrixXd r_;
  double cond_ = 0.0;
};

/// Dense P_X = X^T (XX^T)^{-1} X. Errors: RankDeficient, TooLarge (n > 5000).
MatrixXd projector(const MatrixXd& X);

/// Least-squares fit (XX^T)^{-1} X y through the QR factorization.
VectorXd ols(const MatrixXd& X, const VectorXd& y);

/// True iff X (d x n) has numerical row rank d at kRankTol.
bool has_full_row_rank(const MatrixXd& X);

/// Extreme eigenvalues of a small symmetric matrix, symmetrized first.
std::pair<double, double> symmetric_eig_extrema(const MatrixXd& A);

}  // namespace robust
