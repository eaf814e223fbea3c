#include "robust/linalg.hpp"

#include "robust/error.hpp"
#include "robust/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <string>

namespace robust {

namespace {

// Singular values of R equal those of X because Q has orthonormal columns.
double rank_ratio(const MatrixXd& r) {
  Eigen::JacobiSVD<MatrixXd> svd(r);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0.0;
  return s[s.size() - 1] / s[0];
}

}  // namespace

Projector::Projector(const MatrixXd& X) {
  const Index d = X.rows();
  const Index n = X.cols();
  if (d < 1 || n < d) {
    throw Error(ErrorCode::RankDeficient,
                "design is " + std::to_string(d) + "x" + std::to_string(n) + ", need n >= d >= 1");
  }
  Eigen::HouseholderQR<MatrixXd> qr(X.transpose());
  q_ = qr.householderQ() * MatrixXd::Identity(n, d);
  r_ = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const double ratio = rank_ratio(r_);
  if (!(ratio > kRankTol)) {
    throw Error(ErrorCode::RankDeficient, "sigma_min/sigma_max = " + std::to_string(ratio));
  }
  cond_ = 1.0 / ratio;
}

VectorXd Projector::apply(const VectorXd& v) const { return kernels::parallel::project(q_, v); }

VectorXd Projector::apply_complement(const VectorXd& v) const { return v - apply(v); }

VectorXd Projector::coefficients(const VectorXd& v) const {
  const VectorXd qtv = q_.transpose() * v;
  return r_.triangularView<Eigen::Upper>().solve(qtv);
}

double Projector::objective(const VectorXd& y, const VectorXd& b) const {
  return 0.5 * apply_complement(y - b).squaredNorm();
}

MatrixXd Projector::dense() const {
  if (n() > kDenseProjectorLimit) {
    throw Error(ErrorCode::TooLarge, "dense projector requested for n=" + std::to_string(n()));
  }
  return q_ * q_.transpose();
}

MatrixXd projector(const MatrixXd& X) { return Projector(X).dense(); }

VectorXd ols(const MatrixXd& X, const VectorXd& y) {
  if (y.size() != X.cols()) {
    throw Error(ErrorCode::InvalidArgs, "response length does not match design");
  }
  return Projector(X).coefficients(y);
}

bool has_full_row_rank(const MatrixXd& X) {
  if (X.rows() < 1 || X.cols() < X.rows()) return false;
  Eigen::HouseholderQR<MatrixXd> qr(X.transpose());
  const MatrixXd r = qr.matrixQR().topRows(X.rows()).triangularView<Eigen::Upper>();
  return rank_ratio(r) > kRankTol;
}

std::pair<double, double> symmetric_eig_extrema(const MatrixXd& A) {
  if (A.size() == 0) return {0.0, 0.0};
  const MatrixXd sym = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev[0], ev[ev.size() - 1]};
}

}  // namespace robust
